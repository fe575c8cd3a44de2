"""Deterministic verification reports with plot-ready companions.

A report serializes to JSON with a fixed key order and no timestamps,
so identical runs produce identical bytes.  Alongside the JSON the
writer drops a flat CSV of all checks plus one CSV per attached curve,
and renders each curve to a PNG unless figures are disabled.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = ["Check", "Curve", "VerifyReport", "write_report"]


@dataclass(frozen=True)
class Curve:
    """Plot payload: named columns, one row per sample point."""

    name: str
    columns: tuple[str, ...]
    rows: tuple
    kind: str = "line"  # line | semilogy | heatmap
    shape: tuple[int, int] | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("line", "semilogy", "heatmap"):
            raise ValueError(f"unknown curve kind {self.kind!r}")
        if self.kind == "heatmap" and self.shape is None:
            raise ValueError("heatmap curves need a shape")
        if any(len(row) != len(self.columns) for row in self.rows):
            raise ValueError("curve rows must match the declared columns")


@dataclass(frozen=True)
class Check:
    name: str
    anchor: str
    value: float
    target: float
    tolerance: float
    passed: bool
    detail: str = ""
    curve: Curve | None = None

    def row(self) -> dict:
        return {
            "name": self.name,
            "anchor": self.anchor,
            "value": float(self.value),
            "target": float(self.target),
            "tolerance": float(self.tolerance),
            "passed": bool(self.passed),
            "detail": self.detail,
            "curve": self.curve.name if self.curve else None,
        }


@dataclass(frozen=True)
class VerifyReport:
    scenario: str
    seed: int
    grid: dict
    ladder: tuple[int, ...]
    checks: tuple[Check, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_mapping(self) -> dict:
        return {
            "scenario": self.scenario,
            "seed": self.seed,
            "grid": {k: self.grid[k] for k in sorted(self.grid)},
            "ladder": list(self.ladder),
            "passed": self.passed,
            "counts": {
                "checks": len(self.checks),
                "failed": sum(not c.passed for c in self.checks),
            },
            "checks": [c.row() for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_mapping(), indent=2) + "\n"

    def summary_lines(self) -> list[str]:
        width = max((len(c.name) for c in self.checks), default=0)
        lines = []
        for c in self.checks:
            status = "pass" if c.passed else "FAIL"
            lines.append(
                f"{status}  {c.name:<{width}}  value {c.value:.3e}  tolerance {c.tolerance:.1e}"
            )
        return lines


def _write_checks_csv(report: VerifyReport, path: Path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["name", "anchor", "value", "target", "tolerance", "status", "detail"])
        for c in report.checks:
            writer.writerow(
                [
                    c.name,
                    c.anchor,
                    f"{c.value:.17g}",
                    f"{c.target:.17g}",
                    f"{c.tolerance:.17g}",
                    "pass" if c.passed else "fail",
                    c.detail,
                ]
            )


def _write_curve_csv(curve: Curve, path: Path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(curve.columns)
        for row in curve.rows:
            writer.writerow([f"{float(v):.17g}" for v in row])


def _render_curve(curve: Curve, path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    rows = np.asarray(curve.rows, dtype=float)
    fig, ax = plt.subplots(figsize=(5.4, 3.8), dpi=110)
    if curve.kind == "heatmap":
        nx, ny = curve.shape
        x = rows[:, 0].reshape(nx, ny)
        y = rows[:, 1].reshape(nx, ny)
        v = rows[:, 2].reshape(nx, ny)
        mesh = ax.pcolormesh(x, y, v, shading="nearest")
        fig.colorbar(mesh, ax=ax, label=curve.columns[2])
        ax.set_xlabel(curve.columns[0])
        ax.set_ylabel(curve.columns[1])
    else:
        x = rows[:, 0]
        plot = ax.semilogy if curve.kind == "semilogy" else ax.plot
        for j, name in enumerate(curve.columns[1:], start=1):
            plot(x, rows[:, j], marker="." if len(x) <= 40 else None, label=name)
        ax.set_xlabel(curve.columns[0])
        if len(curve.columns) > 2:
            ax.legend(fontsize=8)
        else:
            ax.set_ylabel(curve.columns[1])
        ax.grid(True, alpha=0.3)
    ax.set_title(curve.name)
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)


def write_report(report: VerifyReport, json_path, figures: bool = True) -> list[Path]:
    """Write the JSON report plus its delimited and rendered companions.

    Companion files share the JSON file's stem: ``<stem>-checks.csv``,
    ``<stem>-<curve>.csv`` and ``<stem>-<curve>.png``.  Returns every
    path written.
    """
    json_path = Path(json_path)
    json_path.parent.mkdir(parents=True, exist_ok=True)
    written = [json_path]
    json_path.write_text(report.to_json(), encoding="ascii")
    checks_path = json_path.with_name(json_path.stem + "-checks.csv")
    _write_checks_csv(report, checks_path)
    written.append(checks_path)
    for check in report.checks:
        if check.curve is None:
            continue
        base = f"{json_path.stem}-{check.curve.name}"
        curve_csv = json_path.with_name(base + ".csv")
        _write_curve_csv(check.curve, curve_csv)
        written.append(curve_csv)
        if figures:
            png = json_path.with_name(base + ".png")
            _render_curve(check.curve, png)
            written.append(png)
    return written
