"""Uniform sample lines and tensor-product grids.

All transforms in this package assume uniform spacing.  A
:class:`SampledLine` holds ``n`` equispaced points covering
``[-half_width, half_width)`` with a configurable sub-cell offset:
``offset=0.5`` places samples at cell midpoints so no point sits on the
window edge, while ``offset=0.0`` reproduces the plain FFT layout that
includes the left endpoint.

The :attr:`SampledLine.dual` line carries the conjugate Fourier
variable.  Spacings satisfy ``step * dual.step == 2*pi/n``, which makes
the discrete transforms in :mod:`psqm.numerics` exactly mutually
inverse between a line and its dual.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

__all__ = [
    "SampledLine",
    "PhaseGrid",
    "ComplexField",
    "PhaseFunction",
    "field_from_function",
    "pad_axis",
    "restrict_axis",
]

PROVENANCE_TAGS = ("direct", "kernel-route", "wigner", "husimi", "weyl-symbol", "synthetic")


@dataclass(frozen=True)
class SampledLine:
    """``n`` equispaced samples of ``[-half_width, half_width)``."""

    half_width: float
    n: int
    offset: float = 0.5

    def __post_init__(self) -> None:
        if self.n <= 0 or self.n % 2:
            raise ValueError("n must be positive and even")
        if self.half_width <= 0:
            raise ValueError("half_width must be positive")

    @property
    def step(self) -> float:
        return 2.0 * self.half_width / self.n

    @property
    def start(self) -> float:
        """Coordinate of the first sample."""
        return -self.half_width + self.offset * self.step

    @cached_property
    def points(self) -> np.ndarray:
        x = self.start + np.arange(self.n) * self.step
        x.setflags(write=False)
        return x

    @cached_property
    def dual(self) -> "SampledLine":
        # step * dual.step == 2*pi/n by construction
        return SampledLine(np.pi / self.step, self.n, offset=0.0)

    def padded(self, factor: int = 2) -> "SampledLine":
        """Same spacing and offset, window and point count scaled by ``factor``.

        The original points occupy the centre block of the padded line.
        """
        if factor < 1:
            raise ValueError("factor must be >= 1")
        return SampledLine(self.half_width * factor, self.n * factor, self.offset)

    def index_of(self, other: "SampledLine") -> int:
        """Index of ``other``'s first point within this line.

        ``other`` must sample the same lattice: equal spacing, aligned
        points, and its window contained in this one.
        """
        if abs(other.step - self.step) > 1e-12 * self.step:
            raise ValueError("lines have different spacing")
        shift = (other.start - self.start) / self.step
        k = int(round(shift))
        if abs(shift - k) > 1e-8 or k < 0 or k + other.n > self.n:
            raise ValueError("not an aligned sub-line")
        return k


@dataclass(frozen=True)
class PhaseGrid:
    """Tensor product of sampled lines.

    A phase plane with ``m`` degrees of freedom uses ``2*m`` axes, the
    first ``m`` for positions and the last ``m`` for their conjugate
    variables.  Fields over position pairs (operator kernels) use the
    same container with both halves sampling position space.
    """

    axes: tuple[SampledLine, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "axes", tuple(self.axes))
        if not self.axes:
            raise ValueError("grid needs at least one axis")

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def m(self) -> int:
        if self.ndim % 2:
            raise ValueError("odd-dimensional grid has no mode count")
        return self.ndim // 2

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(ax.n for ax in self.axes)

    @property
    def cell_volume(self) -> float:
        return float(np.prod([ax.step for ax in self.axes]))

    def mesh(self) -> list[np.ndarray]:
        """Sparse broadcastable coordinate arrays, ``indexing='ij'``."""
        return np.meshgrid(*(ax.points for ax in self.axes), indexing="ij", sparse=True)

    def with_axis(self, i: int, line: SampledLine) -> "PhaseGrid":
        axes = list(self.axes)
        axes[i] = line
        return PhaseGrid(tuple(axes))


@dataclass(frozen=True, eq=False)
class ComplexField:
    """Complex samples on a :class:`PhaseGrid`.

    ``data`` is stored read-only; derive modified fields through
    :func:`dataclasses.replace` or :meth:`with_data` so metadata travels
    along.
    """

    grid: PhaseGrid
    data: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        arr = np.ascontiguousarray(self.data, dtype=np.complex128)
        if arr.shape != self.grid.shape:
            raise ValueError(f"data shape {arr.shape} != grid shape {self.grid.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    def with_data(self, data: np.ndarray, **meta) -> "ComplexField":
        return dataclasses.replace(self, data=data, meta={**self.meta, **meta})

    def integrate(self) -> complex:
        """Cell-volume weighted sum; spectrally accurate for smooth decaying fields."""
        return complex(self.data.sum() * self.grid.cell_volume)

    @property
    def max_abs(self) -> float:
        return float(np.abs(self.data).max())


@dataclass(frozen=True, eq=False)
class PhaseFunction(ComplexField):
    """A field over the (q, p) phase plane that remembers where it came from.

    ``provenance`` is one of ``direct``, ``kernel-route``, ``wigner``,
    ``husimi``, ``weyl-symbol``, or ``synthetic``.
    """

    provenance: str = "synthetic"

    def __post_init__(self) -> None:
        super().__post_init__()
        if self.provenance not in PROVENANCE_TAGS:
            raise ValueError(f"unknown provenance tag {self.provenance!r}")


def field_from_function(grid: PhaseGrid, fn: Callable[..., np.ndarray], **meta) -> ComplexField:
    """Evaluate ``fn(*coords)`` on the grid mesh and wrap it as a field."""
    values = np.asarray(fn(*grid.mesh()), dtype=np.complex128)
    return ComplexField(grid, np.broadcast_to(values, grid.shape).copy(), meta)


def pad_axis(field_: ComplexField, axis: int, factor: int = 2) -> ComplexField:
    """Zero-extend one axis, keeping the original samples centred."""
    line = field_.grid.axes[axis]
    wide = line.padded(factor)
    data = np.zeros(
        field_.grid.with_axis(axis, wide).shape, dtype=np.complex128
    )
    k = wide.index_of(line)
    sl = [slice(None)] * field_.grid.ndim
    sl[axis] = slice(k, k + line.n)
    data[tuple(sl)] = field_.data
    return dataclasses.replace(field_, grid=field_.grid.with_axis(axis, wide), data=data)


def restrict_axis(field_: ComplexField, axis: int, line: SampledLine) -> ComplexField:
    """Crop one axis to an aligned sub-line."""
    k = field_.grid.axes[axis].index_of(line)
    sl = [slice(None)] * field_.grid.ndim
    sl[axis] = slice(k, k + line.n)
    return dataclasses.replace(
        field_,
        grid=field_.grid.with_axis(axis, line),
        data=field_.data[tuple(sl)].copy(),
    )
