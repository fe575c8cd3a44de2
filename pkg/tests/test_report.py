"""Report serialization: stable JSON, CSV companions, rendered figures."""

import json

import numpy as np
import pytest

from psqm.report import Check, Curve, VerifyReport, write_report


def sample_report():
    curve = Curve(
        name="decay",
        columns=("window", "error"),
        rows=((4.0, 1e-2), (6.0, 1e-4), (8.0, 1e-6)),
        kind="semilogy",
    )
    heat = Curve(
        name="surface",
        columns=("q", "p", "value"),
        rows=tuple((float(i), float(j), float(i * j)) for i in range(3) for j in range(3)),
        kind="heatmap",
        shape=(3, 3),
    )
    checks = (
        Check("alpha", "anchor-a", 1e-7, 0.0, 1e-6, True, detail="fine", curve=curve),
        Check("beta", "anchor-b", 2.5, 0.0, 1e-3, False, curve=heat),
    )
    return VerifyReport("demo", 7, {"m": 1, "L": 8.0, "n": 128}, (4, 6, 8), checks)


def test_mapping_key_order_and_counts():
    rep = sample_report()
    mapping = rep.to_mapping()
    assert list(mapping) == ["scenario", "seed", "grid", "ladder", "passed", "counts", "checks"]
    assert list(mapping["grid"]) == ["L", "m", "n"]
    assert mapping["counts"] == {"checks": 2, "failed": 1}
    assert mapping["passed"] is False
    assert rep.passed is False


def test_json_round_trip_and_no_volatile_fields():
    text = sample_report().to_json()
    parsed = json.loads(text)
    assert parsed["checks"][0]["name"] == "alpha"
    assert "time" not in text and "date" not in text
    assert text == sample_report().to_json()


def test_summary_lines():
    lines = sample_report().summary_lines()
    assert len(lines) == 2
    assert lines[0].startswith("pass")
    assert lines[1].startswith("FAIL")
    assert "alpha" in lines[0]


def test_write_report_files(tmp_path):
    paths = write_report(sample_report(), tmp_path / "rep.json")
    names = {p.name for p in paths}
    assert names == {
        "rep.json",
        "rep-checks.csv",
        "rep-decay.csv",
        "rep-decay.png",
        "rep-surface.csv",
        "rep-surface.png",
    }
    rows = (tmp_path / "rep-checks.csv").read_text().splitlines()
    assert rows[0] == "name,anchor,value,target,tolerance,status,detail"
    assert len(rows) == 3
    curve_rows = (tmp_path / "rep-decay.csv").read_text().splitlines()
    assert curve_rows[0] == "window,error"
    assert len(curve_rows) == 4
    png = (tmp_path / "rep-decay.png").read_bytes()
    assert png[:8] == b"\x89PNG\r\n\x1a\n"


def test_write_report_without_figures(tmp_path):
    paths = write_report(sample_report(), tmp_path / "rep.json", figures=False)
    assert not [p for p in paths if p.suffix == ".png"]
    assert (tmp_path / "rep-decay.csv").exists()


def test_write_report_deterministic(tmp_path):
    first = {p.name: p.read_bytes() for p in write_report(sample_report(), tmp_path / "a" / "r.json")}
    second = {p.name: p.read_bytes() for p in write_report(sample_report(), tmp_path / "b" / "r.json")}
    assert first == second


def test_curve_validation():
    with pytest.raises(ValueError, match="kind"):
        Curve("x", ("a",), ((1.0,),), kind="scatter")
    with pytest.raises(ValueError, match="shape"):
        Curve("x", ("a", "b", "c"), ((1.0, 2.0, 3.0),), kind="heatmap")
    with pytest.raises(ValueError, match="columns"):
        Curve("x", ("a", "b"), ((1.0, 2.0, 3.0),))


def test_check_row_is_json_ready():
    check = Check("alpha", "anchor-a", np.float64(0.5), 0.0, 1.0, True)
    row = check.row()
    assert json.dumps(row)
    assert row["passed"] is True
