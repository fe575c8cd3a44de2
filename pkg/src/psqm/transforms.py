r"""Kernel-route expectation transform, its regularized inverse, and the
Wigner/Husimi/Weyl bridges.

The shared pipeline resamples a position-pair field in (difference, mid)
coordinates, transforms the difference variable, and swaps axes.  The
difference coordinate of a kernel supported on the position window
spans twice that window, so the pair grid is zero-padded before the
pullback and the transformed axis keeps the doubled point count.  The
resulting "native" phase grid therefore has the original position line
against a finer, wider dual line; keeping those far-field samples is
what lets the route match the direct one at tight tolerance.

The inverse runs the same chain backwards, with the Gaussian smoothing
undone by Fourier-domain division under a smooth radial window.  The
window keeps the growth of the inverse symbol controlled; its default
radius is the largest whose peak amplification stays below the alarm
threshold.
"""

from __future__ import annotations

import logging

import numpy as np

from .grids import (
    ComplexField,
    PhaseFunction,
    PhaseGrid,
    SampledLine,
    field_from_function,
    pad_axis,
    restrict_axis,
)
from .hilbert import OperatorKernel, OperatorMatrix, StateVector
from .numerics import (
    NumericalAlarm,
    axis_swap,
    convolve,
    endpoint_pullback,
    fourier,
    gaussian_weight,
    middiff_pullback,
    smooth_step,
)

logger = logging.getLogger(__name__)

__all__ = [
    "expect_kernel_route",
    "gaussian_smooth_swap",
    "smooth_swap_inverse",
    "default_cutoff",
    "expectation_inverse",
    "wigner",
    "husimi",
    "weyl_symbol",
    "weyl_quantize",
]


def _pair_transform(field_: ComplexField, smooth: bool) -> ComplexField:
    """Shared chain: pad, endpoint pullback, transform the difference axes,
    optionally smooth with the Gaussian weight, then swap halves.

    The output keeps the padded position axes.  Data there is the honest
    Gaussian tail of the transform, and keeping it means the inverse
    never sees a crop seam, whose ringing the deconvolution would
    amplify catastrophically.
    """
    m = field_.grid.m
    support = field_.grid.axes[0].half_width
    out = field_
    for ax in range(2 * m):
        out = pad_axis(out, ax)
    out = endpoint_pullback(out, support=support)
    out = fourier(out, axes=tuple(range(m)))
    if smooth:
        out = convolve(out, gaussian_weight(out.grid))
    return axis_swap(out)


def expect_kernel_route(op: OperatorMatrix) -> PhaseFunction:
    """Expectation field computed from the operator's integral kernel.

    Output lives on the native grid (position line against the fine dual
    line); agrees with :func:`psqm.coherent.expect_direct` evaluated
    there.
    """
    kern = OperatorKernel.from_matrix(op)
    core = _pair_transform(kern, smooth=True)
    data = core.data * (2.0 * np.pi) ** (1.5 * op.modes)
    meta = {k: core.meta[k] for k in ("mapped_outside",) if k in core.meta}
    return PhaseFunction(core.grid, data, meta, provenance="kernel-route")


def wigner(psi: StateVector, phi: StateVector | None = None) -> PhaseFunction:
    """Wigner transform of a state pair on the native phase grid."""
    phi = psi if phi is None else phi
    if phi.line != psi.line or phi.modes != psi.modes:
        raise ValueError("states live on different grids")
    m = psi.modes
    n = psi.line.n
    shape = (n,) * m
    pair = np.multiply.outer(
        psi.values.reshape(shape), phi.values.conj().reshape(shape)
    )
    field_ = ComplexField(PhaseGrid((psi.line,) * (2 * m)), pair)
    core = _pair_transform(field_, smooth=False)
    data = core.data * (2.0 * np.pi) ** (-0.5 * m)
    return PhaseFunction(core.grid, data, {}, provenance="wigner")


def husimi(psi: StateVector, phi: StateVector | None = None) -> PhaseFunction:
    """Gaussian-smoothed Wigner transform (2^m times the unit-width smoothing)."""
    w = wigner(psi, phi)
    m = w.grid.m
    blur = field_from_function(w.grid, lambda *c: np.exp(-sum(x * x for x in c)))
    data = 2.0**m * convolve(w, blur).data
    return PhaseFunction(w.grid, data, {}, provenance="husimi")


def weyl_symbol(op: OperatorMatrix) -> PhaseFunction:
    """Mid-point symbol of an operator on the native phase grid."""
    kern = OperatorKernel.from_matrix(op)
    core = _pair_transform(kern, smooth=False)
    data = core.data * (2.0 * np.pi) ** (0.5 * op.modes)
    return PhaseFunction(core.grid, data, {}, provenance="weyl-symbol")


def gaussian_smooth_swap(field_: ComplexField) -> ComplexField:
    """Gaussian smoothing followed by the axis swap (the forward smoothing map)."""
    return axis_swap(convolve(field_, gaussian_weight(field_.grid)))


def _dual_radius_sq(grid: PhaseGrid) -> np.ndarray:
    duals = PhaseGrid(tuple(ax.dual for ax in grid.axes))
    return sum(c * c for c in duals.mesh())


def _window_multiplier(grid: PhaseGrid, cutoff_n: int) -> np.ndarray:
    rho_sq = _dual_radius_sq(grid)
    window = smooth_step(cutoff_n + 1.0 - np.sqrt(rho_sq))
    growth = np.exp(np.where(window > 0.0, rho_sq / 4.0, 0.0))
    return (2.0 * np.pi) ** grid.m * growth * window


def default_cutoff(grid: PhaseGrid, alarm: float = 1e12) -> int:
    """Largest window radius whose peak deconvolution amplification stays
    below ``alarm`` on this grid."""
    top = int(np.floor(min(ax.dual.half_width for ax in grid.axes))) - 1
    for cutoff_n in range(top, 0, -1):
        if float(_window_multiplier(grid, cutoff_n).max()) < alarm:
            return cutoff_n
    raise NumericalAlarm("no cutoff radius keeps amplification below the alarm")


def smooth_swap_inverse(
    field_: ComplexField, cutoff_n: int | None = None, alarm: float = 1e12
) -> ComplexField:
    """Invert :func:`gaussian_smooth_swap` by windowed Fourier deconvolution.

    Raises :class:`NumericalAlarm` when the requested window admits
    amplification beyond ``alarm``.  ``meta`` carries the window radius
    and the realized amplification.
    """
    swapped = axis_swap(field_)
    if cutoff_n is None:
        cutoff_n = default_cutoff(swapped.grid, alarm)
    mult = _window_multiplier(swapped.grid, cutoff_n)
    amp = float(mult.max())
    if amp > alarm:
        raise NumericalAlarm(
            f"deconvolution amplification {amp:.3e} exceeds alarm {alarm:.1e} "
            f"at window radius {cutoff_n}"
        )
    spec = fourier(swapped)
    back = fourier(
        spec.with_data(spec.data * mult),
        lines_out=dict(enumerate(swapped.grid.axes)),
        inverse=True,
    )
    logger.debug("deconvolution window radius %d, amplification %.3e", cutoff_n, amp)
    return back.with_data(back.data, cutoff_n=cutoff_n, amplification=amp)


def expectation_inverse(
    phase_fn: ComplexField, cutoff_n: int | None = None, alarm: float = 1e12
) -> OperatorMatrix:
    """Reconstruct the operator whose expectation field is ``phase_fn``.

    Runs the forward kernel route backwards: windowed deconvolution,
    inverse transform of the difference axes onto the padded position
    line, mid/difference resampling, then crop to the central half of
    the position axis (the operator's window) and rescale to a matrix.
    Expects the native grid shape the forward route emits; raises
    ``ValueError`` otherwise.
    """
    m = phase_fn.grid.m
    wide = phase_fn.grid.axes[0]
    for pos, mom in zip(phase_fn.grid.axes[:m], phase_fn.grid.axes[m:]):
        if mom.n != pos.n or abs(pos.step * mom.step - 2.0 * np.pi / pos.n) > 1e-12:
            raise ValueError("phase function does not have the native grid shape")
    line = SampledLine(wide.half_width / 2.0, wide.n // 2, wide.offset)
    t = smooth_swap_inverse(phase_fn, cutoff_n, alarm)
    f = fourier(
        t, axes=tuple(range(m)), lines_out={i: wide for i in range(m)}, inverse=True
    )
    f = middiff_pullback(f, support=wide.half_width)
    for ax in range(2 * m):
        f = restrict_axis(f, ax, line)
    scale = line.step**m * (2.0 * np.pi) ** (-1.5 * m)
    n = line.n**m
    matrix = f.data.reshape(n, n) * scale
    return OperatorMatrix(line, matrix, modes=m)


def weyl_quantize(symbol: ComplexField, hermitian: bool | None = None) -> OperatorMatrix:
    """Operator with the given mid-point symbol.

    The symbol's dual axis is transformed onto the lattice of position
    differences and the position axis is trigonometrically interpolated
    at the midpoints, so constant, linear-in-position, and
    linear-in-momentum symbols quantize exactly.

    The difference synthesis is periodic with period ``2 pi / dp``, so
    matrix entries are trustworthy only for ``|x - x'|`` below half that
    period; physical kernels decay well inside it.
    """
    if symbol.grid.m != 1:
        raise NotImplementedError("quantization is implemented for one mode")
    line, p_line = symbol.grid.axes
    n = line.n
    diffs = np.arange(-(n - 1), n) * line.step
    p = p_line.points
    synth = np.exp(1j * np.outer(p, diffs))
    b = symbol.data @ synth * (p_line.step / np.sqrt(2.0 * np.pi))
    spec = np.fft.fft(b, axis=0)  # plain transform; twiddles live in the synthesis below
    mids = line.start + np.arange(2 * n - 1) * (line.step / 2.0)
    modes = np.fft.fftfreq(n, d=line.step) * 2.0 * np.pi
    interp = np.exp(1j * np.outer(mids - line.start, modes)) / n
    c = interp @ spec
    i = np.arange(n)
    kernel = c[np.add.outer(i, i), np.subtract.outer(i, i) + n - 1] / np.sqrt(2.0 * np.pi)
    matrix = kernel * line.step
    if hermitian is None:
        scale = max(symbol.max_abs, np.finfo(float).tiny)
        hermitian = bool(np.abs(symbol.data.imag).max() <= 1e-12 * scale)
    if hermitian:
        matrix = 0.5 * (matrix + matrix.conj().T)
    return OperatorMatrix(line, matrix, hermitian=hermitian or None)
