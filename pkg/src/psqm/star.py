"""Product of expectation fields, by operator pullback and by quadrature.

The operator route is normative: pull both fields back to matrices,
multiply, and push the product forward again.  The quadrature route
evaluates the defining double integral instead.  Its weight couples the
integration variables to the output point through a triangle-area phase
convolved against a separable window factor; we take that convolution
over all six real coordinates jointly and collapse the first variable
analytically, which leaves a Gaussian damping between the two remaining
integration points.  The alternative reading (convolution over the two
integration variables only) stays available behind ``reading="pair"``
and always reports its deviation from the joint reading.

Quadrature is tensor Gauss-Legendre on a square box.  Everything here
is one-mode only: the triangle area underneath the phase has no
higher-dimensional counterpart.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .coherent import expect_direct
from .duality import CutoffFamily
from .grids import PhaseFunction, PhaseGrid, SampledLine
from .hilbert import OperatorMatrix
from .numerics import NumericalAlarm, fourier
from .transforms import default_cutoff, expectation_inverse

__all__ = [
    "QuadratureSpec",
    "STAR_LADDER",
    "bracket",
    "bracket_kernel_route",
    "delta",
    "omega_n_factor",
    "star_kernel_route",
    "star_operator_route",
]

log = logging.getLogger(__name__)

# window ladder shared with the pairing module's limit convention
STAR_LADDER = (4, 6, 8)


def delta(w, wp, wpp):
    """Twice the signed area of the triangle (w, w', w'').

    Phase points enter as complex numbers; broadcasting over arrays is
    supported.  Row reduction of the defining determinant gives the
    cross product of the two edge vectors.
    """
    w = np.asarray(w, dtype=complex)
    wp = np.asarray(wp, dtype=complex)
    wpp = np.asarray(wpp, dtype=complex)
    out = (wp.real - w.real) * (wpp.imag - w.imag) - (wp.imag - w.imag) * (wpp.real - w.real)
    return out if out.ndim else float(out)


_REFINE = 4  # transform samples per working-grid step


@lru_cache(maxsize=8)
def _growth_window_samples(cutoff_n: int) -> tuple[SampledLine, np.ndarray]:
    # the windowed growth profile s(N+1-|t|) e^{t^2/4} on its support,
    # oversampled so the direct transform below stays spectrally clean
    half = float(cutoff_n + 1)
    step = 0.125 / _REFINE
    line = SampledLine(half, int(round(2.0 * half / step)), 0.5)
    t = line.points
    vals = np.real(CutoffFamily(cutoff_n)(t)) * np.exp(0.25 * t * t)
    vals.setflags(write=False)
    return line, vals


def _growth_window_transform(cutoff_n: int, xi) -> np.ndarray:
    """Transform of the windowed growth profile at arbitrary frequencies."""
    line, vals = _growth_window_samples(cutoff_n)
    xi = np.asarray(xi, dtype=float)
    phases = np.exp(-1j * xi.reshape(-1, 1) * line.points[None, :])
    out = phases @ vals * (line.step / np.sqrt(2.0 * np.pi))
    # even real profile, so the transform is real; drop rounding residue
    return out.real.reshape(xi.shape)


def omega_n_factor(w, wp, wpp, cutoff_n: int):
    """Weight joining the output point to the two integration points.

    Separable by construction: a Gaussian in the first slot and the
    windowed-growth transform, coordinate by coordinate, in the others.
    """
    w = np.asarray(w, dtype=complex)
    wp = np.asarray(wp, dtype=complex)
    wpp = np.asarray(wpp, dtype=complex)
    const = 4.0 / (2.0 * np.pi**2)  # one mode
    damp = np.exp(-(w.real**2 + w.imag**2))
    fac_p = _growth_window_transform(cutoff_n, wp.real) * _growth_window_transform(cutoff_n, wp.imag)
    fac_pp = _growth_window_transform(cutoff_n, wpp.real) * _growth_window_transform(cutoff_n, wpp.imag)
    out = const * damp * fac_p * fac_pp
    return out if np.ndim(out) else float(out)


@dataclass(frozen=True)
class QuadratureSpec:
    """Tensor Gauss-Legendre spec for the quadrature route."""

    points: int = 24
    half_width: float = 4.0
    budget: int = 10**9

    def __post_init__(self) -> None:
        if self.points < 2 or self.half_width <= 0.0 or self.budget < 1:
            raise ValueError("quadrature spec needs points >= 2, a positive box and a positive budget")

    def nodes(self) -> tuple[np.ndarray, np.ndarray]:
        x, w = np.polynomial.legendre.leggauss(self.points)
        return self.half_width * x, self.half_width * w


def _default_output_grid() -> PhaseGrid:
    inner = SampledLine(2.0, 16, 0.5)
    return PhaseGrid((inner, inner))


def star_operator_route(
    g: PhaseFunction,
    h: PhaseFunction,
    cutoff_n: int | None = None,
    grid: PhaseGrid | None = None,
) -> PhaseFunction:
    """Reference product: invert both fields, multiply, expect again.

    Ill-posedness alarms from the inversion propagate unchanged.
    """
    if cutoff_n is None:
        cutoff_n = default_cutoff(g.grid)
    a = expectation_inverse(g, cutoff_n=cutoff_n)
    b = expectation_inverse(h, cutoff_n=cutoff_n)
    prod = OperatorMatrix(a.line, a.matrix @ b.matrix, modes=a.modes)
    out = expect_direct(prod, grid)
    meta = {**out.meta, "route": "operator", "cutoff_n": cutoff_n}
    return dataclasses.replace(out, meta=meta)


def _band_coefficients(field_: PhaseFunction, cutoff_n: int):
    """Windowed, growth-corrected spectrum restricted to the kept band."""
    spec = fourier(field_)
    zq = spec.grid.axes[0]
    zp = spec.grid.axes[1]
    for axis in (zq, zp):
        if cutoff_n + 1 > axis.half_width + 1e-12:
            raise ValueError(f"window radius {cutoff_n + 1} exceeds dual half-width {axis.half_width:.3f}")
    keep_q = np.abs(zq.points) <= cutoff_n + 1.0
    keep_p = np.abs(zp.points) <= cutoff_n + 1.0
    fq = zq.points[keep_q]
    fp = zp.points[keep_p]
    window = CutoffFamily(cutoff_n)
    wq = np.real(window(fq)) * np.exp(0.25 * fq * fq)
    wp = np.real(window(fp)) * np.exp(0.25 * fp * fp)
    coef = spec.data[np.ix_(keep_q, keep_p)] * np.outer(wq, wp)
    coef = coef * (zq.step * zp.step)
    return coef, fq, fp


def _sharpened_at(field_: PhaseFunction, cutoff_n: int, y1: np.ndarray, y2: np.ndarray) -> np.ndarray:
    # 2 pi F^{-1}[window growth F(G)] as a direct mode sum at the
    # requested off-grid points; the 2 pi cancels the inverse-transform
    # prefactor in two dimensions, leaving a bare Riemann sum
    coef, fq, fp = _band_coefficients(field_, cutoff_n)
    e1 = np.exp(1j * y1[:, None] * fq[None, :])
    e2 = np.exp(1j * y2[:, None] * fp[None, :])
    return e1 @ coef @ e2.T


def star_kernel_route(
    g: PhaseFunction,
    h: PhaseFunction,
    cutoff_n: int,
    quad: QuadratureSpec | None = None,
    reading: str = "joint",
    out_grid: PhaseGrid | None = None,
    reference: PhaseFunction | None = None,
    agreement_tol: float = 5e-2,
) -> PhaseFunction:
    """Product by direct quadrature of the defining double integral.

    ``reading`` selects the convolution variables of the weight:
    ``"joint"`` couples all three slots (the artifact's reading) and
    ``"pair"`` couples only the integration slots; the pair reading
    recomputes the joint one and records the relative gap in
    ``meta["joint_deviation"]``.  When ``reference`` is given (normally
    the operator route on the same grid), disagreement beyond
    ``agreement_tol`` raises a :class:`NumericalAlarm`.
    """
    if g.grid.m != 1 or h.grid.m != 1:
        raise NotImplementedError("the quadrature route is defined for one mode")
    if g.grid != h.grid:
        raise ValueError("factor fields live on different grids")
    if reading not in ("joint", "pair"):
        raise ValueError(f"unknown reading {reading!r}")
    quad = quad or QuadratureSpec()
    out_grid = out_grid or _default_output_grid()

    n_nodes = quad.points**2
    n_out = int(np.prod(out_grid.shape))
    evals = n_nodes**2 + n_out * n_nodes
    if evals > quad.budget:
        raise NumericalAlarm(f"quadrature needs {evals:.2e} kernel evaluations, budget is {quad.budget:.2e}")

    x1, w1 = quad.nodes()
    gu = _sharpened_at(g, cutoff_n, x1, x1)
    hu = _sharpened_at(h, cutoff_n, x1, x1)
    yq, yp = (arr.ravel() for arr in np.meshgrid(x1, x1, indexing="ij"))
    weights = np.outer(w1, w1).ravel()

    # the sign of the antisymmetric phase fixes the operator order; the
    # commutator against the operator route pins it (idempotent pairs can't)
    sig = yq[:, None] * yp[None, :] - yp[:, None] * yq[None, :]
    mid = np.exp(2j * sig)
    if reading == "joint":
        dq = yq[:, None] - yq[None, :]
        dp = yp[:, None] - yp[None, :]
        mid = mid * np.exp(-(dq * dq + dp * dp))
        const = 1.0 / (4.0 * np.pi**4)
    else:
        const = 1.0 / (2.0 * np.pi**4)
    core = (weights * gu.ravel())[:, None] * mid * (weights * hu.ravel())[None, :]

    zq, zp = (np.broadcast_to(c, out_grid.shape).ravel() for c in out_grid.mesh())
    # output phases factor per integration slot; BLAS carries the sweep
    u = np.exp(2j * (zq[:, None] * yp[None, :] - zp[:, None] * yq[None, :]))
    v = np.exp(-2j * (zq[:, None] * yp[None, :] - zp[:, None] * yq[None, :]))
    vals = const * np.einsum("za,za->z", u @ core, v)
    data = vals.reshape(out_grid.shape)
    if reading == "pair":
        qs, ps = out_grid.mesh()
        data = data * np.exp(-(qs * qs + ps * ps))

    meta = {"route": f"kernel-{reading}", "cutoff_n": cutoff_n, "quadrature": (quad.points, quad.half_width)}
    if reading == "pair":
        joint = star_kernel_route(g, h, cutoff_n, quad=quad, reading="joint", out_grid=out_grid)
        gap = float(np.abs(data - joint.data).max() / max(np.abs(joint.data).max(), np.finfo(float).tiny))
        meta["joint_deviation"] = gap
        log.warning("pair reading deviates from joint reading by %.3e (relative)", gap)
    out = PhaseFunction(out_grid, data, meta, provenance="synthetic")
    if reference is not None:
        if reference.grid != out_grid:
            raise ValueError("reference field must live on the output grid")
        scale = max(float(np.abs(reference.data).max()), np.finfo(float).tiny)
        dev = float(np.abs(out.data - reference.data).max() / scale)
        out = dataclasses.replace(out, meta={**out.meta, "route_deviation": dev})
        if dev > agreement_tol:
            raise NumericalAlarm(f"quadrature route deviates from reference by {dev:.3e} (tolerance {agreement_tol:.1e})")
    return out


def bracket(
    h: PhaseFunction,
    g: PhaseFunction,
    cutoff_n: int | None = None,
    grid: PhaseGrid | None = None,
) -> PhaseFunction:
    """i(H x G - G x H) through the operator route."""
    hg = star_operator_route(h, g, cutoff_n=cutoff_n, grid=grid)
    gh = star_operator_route(g, h, cutoff_n=cutoff_n, grid=grid)
    data = 1j * (hg.data - gh.data)
    meta = {"route": "bracket-operator", "cutoff_n": hg.meta.get("cutoff_n")}
    return PhaseFunction(hg.grid, data, meta, provenance="direct")


def bracket_kernel_route(
    h: PhaseFunction,
    g: PhaseFunction,
    cutoff_n: int,
    quad: QuadratureSpec | None = None,
    out_grid: PhaseGrid | None = None,
) -> PhaseFunction:
    """Quadrature form of the bracket; for real fields it reduces to
    minus twice the imaginary part of one product sweep."""
    hg = star_kernel_route(h, g, cutoff_n, quad=quad, out_grid=out_grid)
    gh = star_kernel_route(g, h, cutoff_n, quad=quad, out_grid=out_grid)
    data = 1j * (hg.data - gh.data)
    meta = {"route": "bracket-kernel", "cutoff_n": cutoff_n}
    return PhaseFunction(hg.grid, data, meta, provenance="synthetic")
