"""Discretized Hilbert-space objects.

States are sample vectors with the quadrature inner product
``<phi, psi> = dx^m * sum(conj(phi) * psi)``.  Operators are dense
matrices acting by plain matrix-vector product; the corresponding
integral kernel is the matrix scaled by ``1/dx^m``, which makes the
quadrature form of ``<phi, A psi>`` agree with the matrix form exactly.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .grids import ComplexField, PhaseGrid, SampledLine
from .numerics import fourier_axis

__all__ = [
    "StateVector",
    "OperatorMatrix",
    "OperatorKernel",
    "op_identity",
    "op_position",
    "op_momentum",
    "op_function_of",
    "projector",
    "spectral_family",
    "hermite_basis",
    "random_psd",
    "random_smooth_hermitian",
]


@dataclass(frozen=True, eq=False)
class StateVector:
    """Complex samples of a wave function on ``line`` (``n**modes`` entries)."""

    line: SampledLine
    values: np.ndarray
    modes: int = 1
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        v = np.ascontiguousarray(self.values, dtype=np.complex128).reshape(-1)
        if v.size != self.line.n**self.modes:
            raise ValueError("state length does not match line and mode count")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def cell(self) -> float:
        return self.line.step**self.modes

    def norm(self) -> float:
        return float(np.sqrt(self.cell * np.vdot(self.values, self.values).real))

    def normalized(self) -> "StateVector":
        nrm = self.norm()
        if nrm == 0.0:
            raise ValueError("cannot normalize the zero state")
        return dataclasses.replace(self, values=self.values / nrm)

    def inner(self, other: "StateVector") -> complex:
        """Quadrature inner product, conjugate-linear in ``self``."""
        if other.line != self.line or other.modes != self.modes:
            raise ValueError("states live on different grids")
        return complex(self.cell * np.vdot(self.values, other.values))

    def as_field(self) -> ComplexField:
        grid = PhaseGrid((self.line,) * self.modes)
        return ComplexField(grid, self.values.reshape(grid.shape), dict(self.meta))


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Dense operator on the sample space.

    ``hermitian`` is a tri-state: True (validated at construction),
    False (known general), or None (unknown).
    """

    line: SampledLine
    matrix: np.ndarray
    modes: int = 1
    hermitian: bool | None = None

    def __post_init__(self) -> None:
        size = self.line.n**self.modes
        mat = np.ascontiguousarray(self.matrix, dtype=np.complex128)
        if mat.shape != (size, size):
            raise ValueError(f"matrix shape {mat.shape} != {(size, size)}")
        if self.hermitian is True:
            dev = np.abs(mat - mat.conj().T).max()
            if dev > 1e-12:
                raise ValueError(f"hermitian flag set but max asymmetry is {dev:.3e}")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    def apply(self, psi: StateVector) -> StateVector:
        if psi.line != self.line or psi.modes != self.modes:
            raise ValueError("state grid does not match operator grid")
        return dataclasses.replace(psi, values=self.matrix @ psi.values, meta={})

    def adjoint(self) -> "OperatorMatrix":
        return dataclasses.replace(self, matrix=self.matrix.conj().T)

    def matrix_element(self, phi: StateVector, psi: StateVector) -> complex:
        return phi.inner(self.apply(psi))

    def check_hermitian(self, tol: float = 1e-12) -> bool:
        return bool(np.abs(self.matrix - self.matrix.conj().T).max() <= tol)


@dataclass(frozen=True, eq=False)
class OperatorKernel(ComplexField):
    """Integral-kernel view of an operator: samples ``A_ij / dx^m``.

    Lives on the position-pair grid ``(line,)*2m``; converting back to a
    matrix multiplies by the cell volume, so matrix action and kernel
    quadrature are the same sum.
    """

    @classmethod
    def from_matrix(cls, op: OperatorMatrix) -> "OperatorKernel":
        m = op.modes
        n = op.line.n
        grid = PhaseGrid((op.line,) * (2 * m))
        data = op.matrix.reshape((n,) * (2 * m)) / op.line.step**m
        return cls(grid, data, {"modes": m})

    def to_matrix(self, hermitian: bool | None = None) -> OperatorMatrix:
        m = self.grid.m
        line = self.grid.axes[0]
        size = line.n**m
        mat = self.data.reshape(size, size) * line.step**m
        return OperatorMatrix(line, mat, modes=m, hermitian=hermitian)


def op_identity(line: SampledLine) -> OperatorMatrix:
    return OperatorMatrix(line, np.eye(line.n, dtype=np.complex128), hermitian=True)


def op_position(line: SampledLine) -> OperatorMatrix:
    return OperatorMatrix(line, np.diag(line.points.astype(np.complex128)), hermitian=True)


def op_momentum(line: SampledLine) -> OperatorMatrix:
    """Multiplication by the dual variable, conjugated by the grid transform.

    The construction ``F^{-1} diag(xi) F`` is hermitian because the
    inverse transform is the rescaled conjugate transpose of the forward
    one on dual lines.
    """
    eye = np.eye(line.n, dtype=np.complex128)
    spec = fourier_axis(eye, 0, line)
    mat = fourier_axis(line.dual.points[:, None] * spec, 0, line.dual, line, inverse=True)
    # symmetry holds analytically; shed roundoff so the flag's invariant is exact
    mat = 0.5 * (mat + mat.conj().T)
    return OperatorMatrix(line, mat, hermitian=True)


def op_function_of(line: SampledLine, kind: str, g) -> OperatorMatrix:
    """Bounded function of the canonical pair: ``g`` applied to the
    position spectrum (``kind='position'``) or to the dual spectrum
    (``kind='momentum'``).

    ``g`` may be a callable or an array of samples on the spectrum grid.
    """
    if kind == "position":
        spectrum = line.points
    elif kind == "momentum":
        spectrum = line.dual.points
    else:
        raise ValueError("kind must be 'position' or 'momentum'")
    vals = np.asarray(g(spectrum) if callable(g) else g, dtype=np.complex128)
    if vals.shape != (line.n,):
        raise ValueError("sampled function must match the spectrum grid")
    herm = bool(np.abs(vals.imag).max() == 0.0)
    if kind == "position":
        return OperatorMatrix(line, np.diag(vals), hermitian=herm)
    eye = np.eye(line.n, dtype=np.complex128)
    spec = fourier_axis(eye, 0, line)
    mat = fourier_axis(vals[:, None] * spec, 0, line.dual, line, inverse=True)
    if herm:
        mat = 0.5 * (mat + mat.conj().T)
    return OperatorMatrix(line, mat, hermitian=herm)


def projector(psi: StateVector) -> OperatorMatrix:
    """Rank-1 projector onto a unit-norm state (trace 1 by quadrature scaling)."""
    v = psi.values
    return OperatorMatrix(
        psi.line, psi.cell * np.outer(v, v.conj()), modes=psi.modes, hermitian=True
    )


def spectral_family(op: OperatorMatrix, r: float, cluster_tol: float = 1e-10) -> OperatorMatrix:
    """Spectral projector onto eigenvalues ``<= r``.

    Eigenvalues closer than ``cluster_tol`` form a degenerate cluster
    that is included or excluded as a whole, so the family is monotone
    and insensitive to basis choice inside near-degenerate eigenspaces.
    """
    if op.hermitian is False or (op.hermitian is None and not op.check_hermitian(1e-10)):
        raise ValueError("spectral family requires a hermitian operator")
    w, v = np.linalg.eigh(op.matrix)
    k = int(np.searchsorted(w, r, side="right"))
    while 0 < k < w.size and w[k] - w[k - 1] <= cluster_tol:
        k += 1
    block = v[:, :k]
    mat = block @ block.conj().T
    mat = 0.5 * (mat + mat.conj().T)
    return OperatorMatrix(op.line, mat, modes=op.modes, hermitian=True)


def hermite_basis(line: SampledLine, count: int) -> list[StateVector]:
    """First ``count`` oscillator eigenfunctions by the stable normalized recurrence.

    Element 0 is the unit Gaussian ground state; element 1 equals
    ``sqrt(2) * x * (element 0)``.
    """
    if count > line.n // 4:
        raise ValueError("count too large for reliable orthonormality on this grid")
    x = line.points
    h = np.zeros((count, line.n))
    h[0] = np.pi**-0.25 * np.exp(-x * x / 2.0)
    if count > 1:
        h[1] = np.sqrt(2.0) * x * h[0]
    for k in range(1, count - 1):
        h[k + 1] = np.sqrt(2.0 / (k + 1)) * x * h[k] - np.sqrt(k / (k + 1.0)) * h[k - 1]
    return [
        StateVector(line, row, meta={"label": f"hermite{k}"}) for k, row in enumerate(h)
    ]


def random_psd(line: SampledLine, rng: np.random.Generator, rank: int) -> OperatorMatrix:
    """Positive semidefinite ``B* B`` from an unstructured random ``B`` (rank-limited)."""
    if rank == 0:
        return OperatorMatrix(line, np.zeros((line.n, line.n)), hermitian=True)
    b = rng.standard_normal((rank, line.n)) + 1j * rng.standard_normal((rank, line.n))
    mat = b.conj().T @ b
    mat = 0.5 * (mat + mat.conj().T)
    return OperatorMatrix(line, mat, hermitian=True)


def random_smooth_hermitian(
    line: SampledLine,
    rng: np.random.Generator,
    rank: int = 3,
    span: int = 12,
) -> OperatorMatrix:
    """Random hermitian operator with smooth, decaying kernel.

    Eigenvectors are drawn inside the span of the first ``span`` basis
    functions from :func:`hermite_basis`, which keeps the kernel well
    resolved by the grid (the validated envelope for transform-route
    comparisons).
    """
    basis = np.array([s.values for s in hermite_basis(line, span)])
    coeffs = rng.standard_normal((span, rank)) + 1j * rng.standard_normal((span, rank))
    vectors, _ = np.linalg.qr(basis.T @ coeffs)
    lam = rng.standard_normal(rank)
    mat = (vectors * lam) @ vectors.conj().T
    mat = 0.5 * (mat + mat.conj().T)
    return OperatorMatrix(line, mat, hermitian=True)
