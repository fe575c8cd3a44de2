"""State and operator layer: canonical pair, projectors, spectral structure."""

import numpy as np
import pytest

from psqm.coherent import coherent_state
from psqm.hilbert import (
    OperatorKernel,
    OperatorMatrix,
    hermite_basis,
    op_function_of,
    op_identity,
    op_momentum,
    op_position,
    projector,
    random_psd,
    random_smooth_hermitian,
    spectral_family,
)


def test_position_moments(line):
    theta = coherent_state(line, 0.0, 0.0)
    q_op = op_position(line)
    assert abs(q_op.matrix_element(theta, theta)) < 1e-10
    q_sq = OperatorMatrix(line, q_op.matrix @ q_op.matrix, hermitian=True)
    assert q_sq.matrix_element(theta, theta) == pytest.approx(0.5, abs=1e-8)


def test_momentum_derivative_action(line):
    # on the Gaussian ground state the momentum operator acts as i*x
    theta = coherent_state(line, 0.0, 0.0)
    p_op = op_momentum(line)
    assert p_op.hermitian is True
    image = p_op.apply(theta)
    expected = 1j * line.points * theta.values
    assert np.abs(image.values - expected).max() < 1e-10


def test_canonical_commutator_interior(line):
    q_op, p_op = op_position(line), op_momentum(line)
    comm = q_op.matrix @ p_op.matrix - p_op.matrix @ q_op.matrix
    psi = hermite_basis(line, 4)[3]
    residual = comm @ psi.values - 1j * psi.values
    err = np.sqrt(line.step * np.vdot(residual, residual).real)
    assert err < 1e-6


def test_function_of_position_and_momentum(line):
    ident = op_function_of(line, "position", lambda x: np.ones_like(x))
    assert np.abs(ident.matrix - np.eye(line.n)).max() < 1e-14
    assert np.abs(op_function_of(line, "position", lambda x: x).matrix - op_position(line).matrix).max() < 1e-14
    box = op_function_of(line, "position", lambda x: (np.abs(x) <= 2.0).astype(float))
    assert np.abs(box.matrix @ box.matrix - box.matrix).max() < 1e-10
    fp = op_function_of(line, "momentum", lambda xi: np.exp(-xi * xi))
    assert fp.hermitian is True


def test_projector_properties(line):
    theta = coherent_state(line, 1.0, -0.5)
    proj = projector(theta)
    assert np.abs(proj.matrix @ proj.matrix - proj.matrix).max() < 1e-12
    assert np.trace(proj.matrix) == pytest.approx(1.0, abs=1e-10)
    phi = hermite_basis(line, 2)[1]
    lhs = proj.apply(phi).values
    rhs = theta.inner(phi) * theta.values
    assert np.abs(lhs - rhs).max() < 1e-12


def test_spectral_family_limits_and_monotonicity(line, rng):
    op = random_smooth_hermitian(line, rng, rank=4)
    w = np.linalg.eigvalsh(op.matrix)
    assert np.abs(spectral_family(op, w.min() - 1.0).matrix).max() == 0.0
    top = spectral_family(op, w.max() + 1.0)
    assert np.abs(top.matrix - np.eye(line.n)).max() < 1e-10
    prev = spectral_family(op, w.min() - 1.0)
    for r in np.linspace(w.min(), w.max(), 7):
        cur = spectral_family(op, r)
        assert np.abs(cur.matrix @ cur.matrix - cur.matrix).max() < 1e-10
        gap = np.linalg.eigvalsh(cur.matrix - prev.matrix).min()
        assert gap >= -1e-10
        prev = cur


def test_spectral_family_rejects_general_input(line, rng):
    mat = rng.standard_normal((line.n, line.n)) + 1j * rng.standard_normal((line.n, line.n))
    with pytest.raises(ValueError):
        spectral_family(OperatorMatrix(line, mat), 0.0)


def test_hermite_basis(line):
    basis = hermite_basis(line, 8)
    theta = coherent_state(line, 0.0, 0.0)
    assert np.abs(basis[0].values - theta.values).max() < 1e-12
    assert np.abs(basis[1].values - np.sqrt(2.0) * line.points * theta.values).max() < 1e-8
    gram = np.array([[a.inner(b) for b in basis] for a in basis])
    assert np.abs(gram - np.eye(8)).max() < 1e-8
    with pytest.raises(ValueError):
        hermite_basis(line, line.n // 4 + 1)


def test_random_psd(line, rng):
    op = random_psd(line, rng, rank=5)
    w = np.linalg.eigvalsh(op.matrix)
    assert w.min() >= -1e-12
    assert np.count_nonzero(w > 1e-9 * w.max()) <= 5
    zero = random_psd(line, rng, rank=0)
    assert np.abs(zero.matrix).max() == 0.0


def test_kernel_matrix_duality(line, rng):
    op = random_smooth_hermitian(line, rng, rank=3)
    kern = OperatorKernel.from_matrix(op)
    back = kern.to_matrix()
    assert np.abs(back.matrix - op.matrix).max() < 1e-14
    basis = hermite_basis(line, 4)
    for phi in basis[:2]:
        for psi in basis[2:]:
            direct = op.matrix_element(phi, psi)
            quad = line.step**2 * np.einsum(
                "i,ij,j->", phi.values.conj(), kern.data, psi.values
            )
            assert abs(direct - quad) < 1e-10


def test_identity_helper(line):
    theta = coherent_state(line, 0.5, 0.5)
    assert op_identity(line).matrix_element(theta, theta) == pytest.approx(1.0, abs=1e-10)
