"""File formats: bit-exact round trips and header validation."""

import warnings

import numpy as np
import pytest

from psqm.coherent import coherent_state
from psqm.grids import ComplexField, PhaseGrid, SampledLine
from psqm.hilbert import op_position, projector, random_smooth_hermitian
from psqm.io import (
    FormatError,
    read_field,
    read_operator,
    read_state,
    write_field,
    write_operator,
    write_state,
)
from psqm.numerics import WrapAroundWarning
from psqm.transforms import expect_kernel_route


def native_field(line):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WrapAroundWarning)
        return expect_kernel_route(projector(coherent_state(line, 1.0, -0.5)))


def test_state_round_trip_is_bit_exact(line, tmp_path):
    state = coherent_state(line, 1.0, -0.5)
    path = tmp_path / "state.csv"
    write_state(path, state)
    back = read_state(path)
    assert back.line == line
    assert np.array_equal(back.values, state.values)


def test_phase_function_round_trip_keeps_provenance(line, tmp_path):
    phi = native_field(line)
    path = tmp_path / "phi.csv"
    write_field(path, phi)
    back = read_field(path)
    assert back.grid == phi.grid
    assert np.array_equal(back.data, phi.data)
    assert back.provenance == "kernel-route"


def test_plain_field_round_trip_stays_plain(tmp_path):
    grid = PhaseGrid((SampledLine(4.0, 8), SampledLine(4.0, 8)))
    qs, ps = grid.mesh()
    field_ = ComplexField(grid, np.exp(-(qs * qs + ps * ps) + 0.3j * qs), {})
    path = tmp_path / "field.csv"
    write_field(path, field_)
    back = read_field(path)
    assert type(back) is ComplexField
    assert np.array_equal(back.data, field_.data)


def test_operator_round_trip_with_hermitian_flag(line, rng, tmp_path):
    op = random_smooth_hermitian(line, rng, 3)
    path = tmp_path / "op.csv"
    write_operator(path, op)
    back = read_operator(path)
    assert back.hermitian is True
    assert back.line == line
    assert np.array_equal(back.matrix, op.matrix)


def test_operator_with_offset_axis_round_trips(tmp_path):
    shifted = SampledLine(4.0, 8, 0.0)
    op = op_position(shifted)
    path = tmp_path / "op.csv"
    write_operator(path, op)
    back = read_operator(path)
    assert back.line == shifted


def test_reader_rejects_row_count_mismatch(line, tmp_path):
    state = coherent_state(line, 0.0, 0.0)
    path = tmp_path / "state.csv"
    write_state(path, state)
    text = path.read_text().splitlines()
    path.write_text("\n".join(text[:-1]) + "\n")
    with pytest.raises(FormatError, match="rows"):
        read_state(path)


def test_reader_rejects_header_grid_mismatch(line, tmp_path):
    state = coherent_state(line, 0.0, 0.0)
    path = tmp_path / "state.csv"
    write_state(path, state)
    text = path.read_text().replace("n=128", "n=64")
    path.write_text(text)
    with pytest.raises(FormatError):
        read_state(path)


def test_reader_rejects_missing_header(tmp_path):
    path = tmp_path / "bare.csv"
    path.write_text("0,1,0\n")
    with pytest.raises(FormatError, match="header"):
        read_field(path)


def test_reader_rejects_kind_confusion(line, rng, tmp_path):
    op = random_smooth_hermitian(line, rng, 2)
    op_path = tmp_path / "op.csv"
    write_operator(op_path, op)
    with pytest.raises(FormatError, match="operator file"):
        read_field(op_path)
    state_path = tmp_path / "state.csv"
    write_state(state_path, coherent_state(line, 0.0, 0.0))
    with pytest.raises(FormatError, match="matrix"):
        read_operator(state_path)


def test_reader_rejects_edited_coordinates(line, tmp_path):
    phi = native_field(line)
    path = tmp_path / "phi.csv"
    write_field(path, phi)
    lines = path.read_text().splitlines()
    first_data = next(i for i, ln in enumerate(lines) if not ln.startswith("#"))
    cols = lines[first_data].split(",")
    cols[0] = "99"
    lines[first_data] = ",".join(cols)
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(FormatError, match="coordinate"):
        read_field(path)
