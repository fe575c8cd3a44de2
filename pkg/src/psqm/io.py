"""CSV files for states, operators, and phase-space fields.

One row per sample, 17 significant digits, so values round trip to the
bit.  Every file starts with a ``# grid:`` summary line that readers
validate against the row count.  Grids whose axes deviate from the
symmetric midpoint layout carry an extra ``# axes:`` line with the
exact per-axis parameters; phase functions carry their provenance tag
the same way.
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .grids import ComplexField, PhaseFunction, PhaseGrid, SampledLine
from .hilbert import OperatorMatrix, StateVector

__all__ = [
    "FormatError",
    "read_field",
    "read_operator",
    "read_state",
    "write_field",
    "write_operator",
    "write_state",
]


class FormatError(ValueError):
    """A file does not match the declared layout."""


_GRID_RE = re.compile(r"^# grid: m=(\S+) L=(\S+) n=(\d+)(; view: matrix)?\s*$")


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _mode_count(grid: PhaseGrid) -> int:
    # fields over position pairs and phase planes both use 2m axes;
    # bare states use one axis per mode
    return grid.ndim // 2 if grid.ndim % 2 == 0 else grid.ndim


def _needs_axes_line(grid: PhaseGrid) -> bool:
    first = grid.axes[0]
    plain = SampledLine(first.half_width, first.n, 0.5)
    return any(ax != plain for ax in grid.axes)


def _axes_line(axes) -> str:
    parts = [f"{_fmt(ax.half_width)},{ax.n},{_fmt(ax.offset)}" for ax in axes]
    return "# axes: " + "; ".join(parts)


def _parse_axes_line(text: str, path: Path) -> tuple[SampledLine, ...]:
    axes = []
    for part in text.split(":", 1)[1].split(";"):
        try:
            hw, n, off = part.strip().split(",")
            axes.append(SampledLine(float(hw), int(n), float(off)))
        except ValueError as exc:
            raise FormatError(f"{path}: malformed axes entry {part.strip()!r}") from exc
    return tuple(axes)


def _header_lines(path: Path) -> list[str]:
    lines = []
    with open(path, encoding="ascii") as fh:
        for raw in fh:
            if not raw.startswith("#"):
                break
            lines.append(raw.rstrip("\n"))
    return lines


def _parse_grid_line(path: Path, want_matrix: bool) -> tuple[int, float, int, list[str]]:
    lines = _header_lines(path)
    if not lines:
        raise FormatError(f"{path}: missing grid header")
    match = _GRID_RE.match(lines[0])
    if match is None:
        raise FormatError(f"{path}: unrecognized grid header {lines[0]!r}")
    modes, half_width, n = int(match.group(1)), float(match.group(2)), int(match.group(3))
    is_matrix = match.group(4) is not None
    if want_matrix and not is_matrix:
        raise FormatError(f"{path}: expected an operator file (missing matrix view)")
    if not want_matrix and is_matrix:
        raise FormatError(f"{path}: got an operator file where a field was expected")
    return modes, half_width, n, lines[1:]


def _load_rows(path: Path, columns: int) -> np.ndarray:
    try:
        rows = np.loadtxt(path, delimiter=",", ndmin=2)
    except ValueError as exc:
        raise FormatError(f"{path}: malformed data rows") from exc
    if rows.size == 0:
        raise FormatError(f"{path}: no data rows")
    if rows.shape[1] != columns:
        raise FormatError(f"{path}: expected {columns} columns, found {rows.shape[1]}")
    return rows


def _coordinate_columns(grid: PhaseGrid) -> np.ndarray:
    mesh = np.meshgrid(*(ax.points for ax in grid.axes), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def write_field(path, field_: ComplexField) -> None:
    path = Path(path)
    grid = field_.grid
    first = grid.axes[0]
    header = [f"# grid: m={_mode_count(grid)} L={_fmt(first.half_width)} n={first.n}"]
    if _needs_axes_line(grid):
        header.append(_axes_line(grid.axes))
    if isinstance(field_, PhaseFunction):
        header.append(f"# provenance: {field_.provenance}")
    flat = field_.data.ravel()
    block = np.column_stack([_coordinate_columns(grid), flat.real, flat.imag])
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(header) + "\n")
        np.savetxt(fh, block, fmt="%.17g", delimiter=",")


def read_field(path) -> ComplexField:
    path = Path(path)
    modes, half_width, n, extra = _parse_grid_line(path, want_matrix=False)
    axes = None
    provenance = None
    for line in extra:
        if line.startswith("# axes:"):
            axes = _parse_axes_line(line, path)
        elif line.startswith("# provenance:"):
            provenance = line.split(":", 1)[1].strip()
    with open(path, encoding="ascii") as fh:
        first_data = next((ln for ln in fh if not ln.startswith("#")), None)
    if first_data is None:
        raise FormatError(f"{path}: no data rows")
    ndim = first_data.count(",") - 1
    if ndim < 1:
        raise FormatError(f"{path}: too few columns for a field")
    if axes is None:
        axes = (SampledLine(half_width, n, 0.5),) * ndim
    if len(axes) != ndim:
        raise FormatError(f"{path}: axes line lists {len(axes)} axes, rows carry {ndim}")
    if axes[0].n != n or axes[0].half_width != half_width:
        raise FormatError(f"{path}: axes line disagrees with the grid summary")
    grid = PhaseGrid(axes)
    if _mode_count(grid) != modes:
        raise FormatError(f"{path}: grid summary declares m={modes} for a {ndim}-axis field")
    rows = _load_rows(path, ndim + 2)
    expected = int(np.prod(grid.shape))
    if rows.shape[0] != expected:
        raise FormatError(f"{path}: expected {expected} rows, found {rows.shape[0]}")
    if not np.array_equal(rows[:, :ndim], _coordinate_columns(grid)):
        raise FormatError(f"{path}: coordinate columns do not match the declared grid")
    data = (rows[:, ndim] + 1j * rows[:, ndim + 1]).reshape(grid.shape)
    if provenance is not None:
        return PhaseFunction(grid, data, {}, provenance=provenance)
    return ComplexField(grid, data, {})


def write_state(path, state: StateVector) -> None:
    write_field(path, state.as_field())


def read_state(path) -> StateVector:
    field_ = read_field(path)
    axes = field_.grid.axes
    if any(ax != axes[0] for ax in axes):
        raise FormatError(f"{path}: state axes must all match")
    return StateVector(axes[0], field_.data.ravel(), modes=len(axes))


def write_operator(path, op: OperatorMatrix) -> None:
    path = Path(path)
    line = op.line
    header = [f"# grid: m={op.modes} L={_fmt(line.half_width)} n={line.n}; view: matrix"]
    if line.offset != 0.5:
        header.append(_axes_line((line,)))
    if op.hermitian is not None:
        header.append(f"# hermitian: {'true' if op.hermitian else 'false'}")
    size = line.n**op.modes
    i, j = np.meshgrid(np.arange(size), np.arange(size), indexing="ij")
    block = np.column_stack(
        [i.ravel(), j.ravel(), op.matrix.real.ravel(), op.matrix.imag.ravel()]
    )
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(header) + "\n")
        np.savetxt(fh, block, fmt=["%d", "%d", "%.17g", "%.17g"], delimiter=",")


def read_operator(path) -> OperatorMatrix:
    path = Path(path)
    modes, half_width, n, extra = _parse_grid_line(path, want_matrix=True)
    line = SampledLine(half_width, n, 0.5)
    hermitian = None
    for text in extra:
        if text.startswith("# axes:"):
            axes = _parse_axes_line(text, path)
            if len(axes) != 1 or axes[0].n != n or axes[0].half_width != half_width:
                raise FormatError(f"{path}: axes line disagrees with the grid summary")
            line = axes[0]
        elif text.startswith("# hermitian:"):
            hermitian = text.split(":", 1)[1].strip() == "true"
    rows = _load_rows(path, 4)
    size = n**modes
    if rows.shape[0] != size * size:
        raise FormatError(f"{path}: expected {size * size} rows, found {rows.shape[0]}")
    i, j = np.meshgrid(np.arange(size), np.arange(size), indexing="ij")
    if not (np.array_equal(rows[:, 0], i.ravel()) and np.array_equal(rows[:, 1], j.ravel())):
        raise FormatError(f"{path}: index columns are not in row-major order")
    matrix = (rows[:, 2] + 1j * rows[:, 3]).reshape(size, size)
    try:
        return OperatorMatrix(line, matrix, modes=modes, hermitian=hermitian)
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from exc
