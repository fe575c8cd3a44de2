r"""Dual pairing functionals: smooth cutoffs, the sampled multipliers, and
the pairing that evaluates matrix elements from phase-space data.

The multiplier for a state pair is a Gaussian-deconvolved Wigner-type
field: its transform is the pair's transform times the cutoff window
times the quarter-exponential growth factor.  Pairing integrates the
multiplier against an expectation field; as the cutoff index grows the
result converges to the matrix element of the underlying operator.

The window is the product profile

    h(x) = prod_j s(N + 1 - |x_j|),    s(t) = f(t) / (f(t) + f(1 - t))

with f(t) = exp(-1/t) for positive t, so h is exactly 1 on the closed
box of radius N and exactly 0 outside radius N + 1.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .grids import ComplexField, PhaseFunction, PhaseGrid
from .hilbert import StateVector
from .numerics import fourier, smooth_step
from .transforms import wigner

__all__ = [
    "CutoffFamily",
    "PairingFunctional",
    "make_cutoff",
    "pairing_multiplier",
    "pair",
    "s_relations_check",
]


@dataclass(frozen=True)
class CutoffFamily:
    """Smooth box cutoff of radius ``cutoff_n`` (flat core, unit transition shell)."""

    cutoff_n: int

    def __post_init__(self) -> None:
        if self.cutoff_n < 1:
            raise ValueError("cutoff index must be positive")

    @staticmethod
    def profile(t):
        return smooth_step(t)

    def __call__(self, *coords) -> np.ndarray:
        out = np.ones(np.broadcast(*coords).shape if len(coords) > 1 else np.shape(coords[0]))
        for c in coords:
            out = out * smooth_step(self.cutoff_n + 1.0 - np.abs(c))
        return out


def make_cutoff(cutoff_n: int, grid: PhaseGrid) -> ComplexField:
    """Sample the box cutoff on ``grid``; exact 1 / 0 plateaus at sample points."""
    for ax in grid.axes:
        if cutoff_n + 1 > ax.half_width:
            raise ValueError("cutoff support does not fit inside the grid window")
    family = CutoffFamily(cutoff_n)
    return ComplexField(grid, family(*grid.mesh()), {"cutoff_n": cutoff_n})


@dataclass(frozen=True)
class PairingFunctional:
    """Sampled multiplier realizing one dual functional at a finite cutoff."""

    field: ComplexField
    cutoff_n: int
    states: tuple[str, str] = ("phi", "psi")
    meta: dict = field(default_factory=dict)


def pairing_multiplier(
    phi: StateVector, psi: StateVector, cutoff_n: int
) -> PairingFunctional:
    """Multiplier field for the pair ``(phi, psi)`` at the given cutoff.

    Built in the transform domain: the window times exp(|zeta|^2/4)
    applied to the transform of the pair's Wigner-type field.  This is
    the convolution against the materialized transform of the windowed
    growth factor, collapsed through the convolution theorem (that
    function is even, so transforming twice returns it unchanged).
    """
    m = psi.modes
    w = wigner(psi, phi)
    scale = (2.0 * np.pi) ** (0.5 * m)
    spec = fourier(w.with_data(w.data * scale))
    duals = tuple(ax.dual for ax in w.grid.axes)
    for ax in duals:
        if cutoff_n + 1 > ax.half_width:
            raise ValueError("cutoff support does not fit inside the transform window")
    mesh = PhaseGrid(duals).mesh()
    window = CutoffFamily(cutoff_n)(*mesh)
    rho_sq = sum(c * c for c in mesh)
    peak = 2.0 * m * (cutoff_n + 1.0) ** 2 / 4.0
    if peak > np.log(np.finfo(float).max):
        warnings.warn("growth factor overflows inside the cutoff support", stacklevel=2)
    growth = np.exp(np.where(window > 0.0, rho_sq / 4.0, 0.0))
    mult = window * growth
    back = fourier(
        spec.with_data(spec.data * mult),
        lines_out=dict(enumerate(w.grid.axes)),
        inverse=True,
    )
    data = back.data * (2.0 * np.pi) ** (-0.5 * m)
    labels = (
        str(phi.meta.get("label", "phi")),
        str(psi.meta.get("label", "psi")),
    )
    return PairingFunctional(
        field=ComplexField(w.grid, data), cutoff_n=cutoff_n, states=labels
    )


def pair(functional: PairingFunctional, phase_fn: ComplexField) -> complex:
    """Integrate the multiplier against a phase-space function (no conjugation)."""
    if functional.field.grid != phase_fn.grid:
        raise ValueError("multiplier and phase function grids differ")
    return complex(
        (functional.field.data * phase_fn.data).sum() * phase_fn.grid.cell_volume
    )


def s_relations_check(
    phi: StateVector, psi: StateVector, cutoff_n: int
) -> dict[str, float]:
    """Max deviations of the Wigner and Husimi smoothing identities at this cutoff.

    The Wigner field equals 2^m times the unit Gaussian convolved with
    the multiplier; the Husimi field equals the half-width Gaussian
    convolved with it (no prefactor).
    """
    from .grids import field_from_function
    from .numerics import WrapAroundWarning, convolve
    from .transforms import husimi

    m = psi.modes
    s = pairing_multiplier(phi, psi, cutoff_n)
    w = wigner(psi, phi)
    h = husimi(psi, phi)
    narrow = field_from_function(w.grid, lambda *c: np.exp(-sum(x * x for x in c)))
    wide = field_from_function(w.grid, lambda *c: np.exp(-0.5 * sum(x * x for x in c)))
    with warnings.catch_warnings():
        # the multiplier's sinc tails put ~1e-6 of mass near the window
        # edge; the wrap they cause sits orders below the tolerances here
        warnings.simplefilter("ignore", WrapAroundWarning)
        w_rhs = 2.0**m * convolve(narrow, s.field).data
        h_rhs = convolve(wide, s.field).data
    return {
        "wigner_dev": float(np.abs(w.data - w_rhs).max()),
        "husimi_dev": float(np.abs(h.data - h_rhs).max()),
    }
