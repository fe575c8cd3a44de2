"""Kernel-route expectations, quasi-probability bridges, and the inverse map."""

import warnings

import numpy as np
import pytest

from psqm.coherent import coherent_state, expect_direct
from psqm.grids import PhaseGrid, PhaseFunction, SampledLine, field_from_function
from psqm.hilbert import (
    OperatorMatrix,
    StateVector,
    hermite_basis,
    op_identity,
    projector,
    random_smooth_hermitian,
)
from psqm.numerics import NumericalAlarm, WrapAroundWarning, convolve, gaussian_weight
from psqm.transforms import (
    default_cutoff,
    expect_kernel_route,
    expectation_inverse,
    gaussian_smooth_swap,
    husimi,
    smooth_swap_inverse,
    weyl_quantize,
    weyl_symbol,
    wigner,
)


def native_expectation(op):
    """Kernel-route field with the benign smoothing-edge warning silenced."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WrapAroundWarning)
        return expect_kernel_route(op)


def coherent_projector(line, q=0.0, p=0.0):
    return projector(coherent_state(line, q, p))


def test_native_grid_geometry(line):
    phi = native_expectation(op_identity(line))
    pos, mom = phi.grid.axes
    # position axis keeps the padded window so the inverse never meets a seam
    assert pos.half_width == 2 * line.half_width
    assert pos.n == 2 * line.n
    assert pos.step == line.step
    assert mom.n == pos.n
    assert abs(pos.step * mom.step - 2 * np.pi / pos.n) < 1e-14
    assert phi.provenance == "kernel-route"


def test_kernel_route_matches_analytic_on_packet(line):
    for a, b in [(0.0, 0.0), (2.0, 0.0), (-1.0, 1.5)]:
        phi = native_expectation(coherent_projector(line, a, b))
        qs, ps = phi.grid.mesh()
        exact = np.exp(-0.5 * ((qs - a) ** 2 + (ps - b) ** 2))
        assert np.abs(phi.data - exact).max() < 1e-11


def test_kernel_route_agrees_with_direct(line, rng):
    for rank in (1, 3, 5):
        op = random_smooth_hermitian(line, rng, rank)
        phi = native_expectation(op)
        ref = expect_direct(op, phi.grid)
        assert np.abs(phi.data - ref.data).max() < 1e-10


def test_kernel_route_identity_interior(line):
    # the identity kernel is a lattice delta, so the two routes only agree
    # below band edge; on the default evaluation region they coincide and
    # the value sits on the erf window of the truncated line
    phi = native_expectation(op_identity(line))
    qs, ps = phi.grid.mesh()
    mask = (np.abs(qs) <= 4.0) & (np.abs(ps) <= 20.0)
    assert np.abs(phi.data - 1.0)[mask].max() < 1e-6


def test_wigner_ground_packet(line):
    w = wigner(coherent_state(line, 0.0, 0.0))
    qs, ps = w.grid.mesh()
    exact = np.exp(-(qs**2 + ps**2)) / np.pi
    assert np.abs(w.data - exact).max() < 1e-12
    assert w.provenance == "wigner"


def test_wigner_normalization(line):
    for psi in hermite_basis(line, 4):
        assert abs(wigner(psi).integrate() - 1.0) < 1e-10
    mix = StateVector(line, hermite_basis(line, 4)[0].values + 0.7j * hermite_basis(line, 4)[3].values)
    assert abs(wigner(mix).integrate() - mix.norm() ** 2) < 1e-8


def test_wigner_pair_conjugate_symmetry(line):
    psi = hermite_basis(line, 2)[1]
    phi = coherent_state(line, 0.8, -0.3)
    assert np.abs(wigner(psi, phi).data - wigner(phi, psi).data.conj()).max() < 1e-12


def test_husimi_ground_packet(line):
    h = husimi(coherent_state(line, 0.0, 0.0))
    qs, ps = h.grid.mesh()
    exact = np.exp(-0.5 * (qs**2 + ps**2)) / (2 * np.pi)
    assert np.abs(h.data - exact).max() < 1e-12
    assert h.provenance == "husimi"


def test_husimi_is_scaled_packet_expectation(line):
    mix = StateVector(line, hermite_basis(line, 4)[0].values + 0.7 * hermite_basis(line, 4)[3].values).normalized()
    h = husimi(mix)
    phi = native_expectation(projector(mix))
    assert np.abs(2 * np.pi * h.data - phi.data).max() < 1e-10
    assert np.real(h.data).min() > -1e-12
    assert np.abs(np.imag(h.data)).max() < 1e-12


def test_weyl_symbol_of_packet_projector(line):
    sym = weyl_symbol(coherent_projector(line))
    qs, ps = sym.grid.mesh()
    exact = 2.0 * np.exp(-(qs**2 + ps**2))
    assert np.abs(sym.data - exact).max() < 1e-12
    assert sym.provenance == "weyl-symbol"


def test_weyl_quantize_flat_and_linear_symbols(line):
    grid = PhaseGrid((line, line.dual))
    x = line.points
    one = weyl_quantize(field_from_function(grid, lambda q, p: np.ones_like(q)))
    assert np.abs(one.matrix - np.eye(line.n)).max() < 1e-11
    pos = weyl_quantize(field_from_function(grid, lambda q, p: q + 0 * p))
    assert np.abs(pos.matrix - np.diag(x.astype(complex))).max() < 1e-11
    mom = weyl_quantize(field_from_function(grid, lambda q, p: p + 0 * q))
    from psqm.hilbert import op_momentum

    assert np.abs(mom.matrix - op_momentum(line).matrix).max() < 1e-11


def test_weyl_round_trip_on_packet_projector(line):
    # the symbol lives on the padded native grid, so the quantization
    # reconstructs the projector on the padded line; entries beyond the
    # difference-synthesis period alias and stay out of the comparison
    op = coherent_projector(line, 0.5, -1.0)
    back = weyl_quantize(weyl_symbol(op))
    wide = back.line
    assert wide.half_width == 2 * line.half_width
    ref = coherent_projector(wide, 0.5, -1.0)
    x = wide.points
    mask = np.abs(x[:, None] - x[None, :]) <= wide.half_width
    assert np.abs(back.matrix - ref.matrix)[mask].max() < 1e-8
    assert back.hermitian is True


@pytest.mark.filterwarnings("ignore::psqm.numerics.WrapAroundWarning")
def test_weyl_expectation_is_smoothed_symbol(line):
    # quantized Gaussian symbols: packet expectation equals the weighted
    # convolution with the 2 pi scale, checked on the interior block
    grid = PhaseGrid((line, line.dual))
    omega = gaussian_weight(grid)
    qs, ps = grid.mesh()
    mask = (np.abs(qs) <= 4.0) & (np.abs(ps) <= 4.0)
    cases = [(0.0, 0.0, 1.0, 1.0), (1.0, -0.5, 3.0, 1.0), (-1.5, 0.0, 2.2, 0.7)]
    for a, b, c, amp in cases:
        sym = field_from_function(
            grid, lambda q, p, a=a, b=b, c=c, amp=amp: amp * np.exp(-((q - a) ** 2 + (p - b) ** 2) / c)
        )
        op = weyl_quantize(sym)
        lhs = expect_direct(op, grid).data
        rhs = 2 * np.pi * convolve(omega, sym).data
        assert np.abs(lhs - rhs)[mask].max() < 1e-10


def test_smoothing_map_on_gaussian(line):
    # exact image of a width-sqrt(2) Gaussian; tails clear the window
    sq = PhaseGrid((line, line))
    t = field_from_function(sq, lambda x, y: np.exp(-0.5 * (x * x + y * y)))
    g = gaussian_smooth_swap(t)
    xs, ys = sq.mesh()
    exact = np.exp(-(xs * xs + ys * ys) / 3.0) / (3 * np.pi)
    assert np.abs(g.data - exact).max() < 1e-10


def test_smoothing_map_swaps_narrow_bump(line):
    # a near-delta bump at (a, b) lands as a weight packet centred at (b, a)
    a, b, w = 1.5, -2.0, 0.4
    sq = PhaseGrid((line, line))
    t = field_from_function(sq, lambda x, y: np.exp(-((x - a) ** 2 + (y - b) ** 2) / w**2))
    g = gaussian_smooth_swap(t)
    xs, ys = sq.mesh()
    s2 = 1.0 + w * w
    exact = (w * w / (2 * np.pi * s2)) * np.exp(-((xs - b) ** 2 + (ys - a) ** 2) / s2)
    assert np.abs(g.data - exact).max() < 1e-12


@pytest.mark.filterwarnings("ignore::psqm.numerics.WrapAroundWarning")
def test_smooth_swap_inverse_round_trip(line):
    sq = PhaseGrid((line, line))
    t = field_from_function(sq, lambda x, y: np.exp(-(x * x + y * y) / 4.0))
    back = smooth_swap_inverse(gaussian_smooth_swap(t))
    assert np.abs(back.data - t.data).max() < 1e-4
    assert back.meta["cutoff_n"] == 9


def test_default_cutoff_saturates_alarm(line):
    phi = native_expectation(coherent_projector(line))
    assert default_cutoff(phi.grid) == 9
    with pytest.raises(NumericalAlarm):
        smooth_swap_inverse(phi, cutoff_n=10)
    # explicit windows below the default stay quiet
    for n in (4, 6, 9):
        smooth_swap_inverse(phi, cutoff_n=n)


def test_expectation_inverse_on_oscillator_projectors(line):
    basis = hermite_basis(line, 6)
    for k, psi in enumerate(basis):
        op = projector(psi)
        back = expectation_inverse(native_expectation(op))
        rel = np.linalg.norm(back.matrix - op.matrix) / np.linalg.norm(op.matrix)
        assert rel < 1e-3, f"projector {k}: {rel:.3e}"


def test_expectation_inverse_on_span_combination(line, rng):
    basis = hermite_basis(line, 6)
    coeffs = rng.normal(size=6) + 1j * rng.normal(size=6)
    mat = sum(c * projector(b).matrix for c, b in zip(coeffs, basis))
    op = OperatorMatrix(line, mat)
    back = expectation_inverse(native_expectation(op))
    assert np.linalg.norm(back.matrix - mat) / np.linalg.norm(mat) < 1e-3


def test_expectation_inverse_sharpens_with_window(line):
    op = projector(hermite_basis(line, 1)[0])
    phi = native_expectation(op)
    errs = []
    for n in (4, 6, 8):
        back = expectation_inverse(phi, cutoff_n=n)
        errs.append(np.linalg.norm(back.matrix - op.matrix) / np.linalg.norm(op.matrix))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-6


def test_expectation_inverse_is_linear(line):
    basis = hermite_basis(line, 3)
    g0 = native_expectation(projector(basis[0]))
    g2 = native_expectation(projector(basis[2]))
    combo = PhaseFunction(g0.grid, 0.3 * g0.data + (0.7 + 0.2j) * g2.data, provenance="synthetic")
    lhs = expectation_inverse(combo).matrix
    rhs = 0.3 * expectation_inverse(g0).matrix + (0.7 + 0.2j) * expectation_inverse(g2).matrix
    # every step is linear; the slack is last-bit noise under the growth factor
    assert np.abs(lhs - rhs).max() < 1e-8


def test_expectation_inverse_identity_envelope(line):
    # the identity violates the decay precondition: the truncated line gives
    # its expectation a sharp support edge whose deconvolved spectrum never
    # falls below the cutoff radius, so the reconstruction rings like any
    # band-limited box (about 1/(pi B r) at distance r from the edge)
    op = op_identity(line)
    back = expectation_inverse(native_expectation(op))
    x = line.points
    center = int(np.argmin(np.abs(x)))
    assert abs(back.matrix[center, center] - 1.0) < 5e-3
    sel = np.abs(x) <= 4.0
    sub = back.matrix[np.ix_(sel, sel)] - np.eye(int(sel.sum()))
    assert np.abs(sub).max() < 2e-2
    assert np.linalg.norm(back.matrix - op.matrix) / np.linalg.norm(op.matrix) < 0.1


def test_expectation_inverse_rejects_foreign_grid(line):
    sq = PhaseGrid((line, line))
    bad = PhaseFunction(sq, np.zeros(sq.shape), provenance="synthetic")
    with pytest.raises(ValueError, match="native grid"):
        expectation_inverse(bad)
