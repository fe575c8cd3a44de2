r"""Gaussian wave packets centred on phase-space points, and the direct
expectation map that samples :math:`(q, p) \mapsto \langle \theta_{qp}, A\, \theta_{qp} \rangle`.

The packet centred at ``(q, p)`` is
:math:`\pi^{-m/4} e^{i p \cdot (x - q/2)} e^{-\|x - q\|^2 / 2}`; its
squared modulus is a unit Gaussian, so grid norms sit at 1 up to window
truncation.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .grids import PhaseFunction, PhaseGrid, SampledLine
from .hilbert import OperatorMatrix, StateVector
from .numerics import fourier_axis

__all__ = [
    "CoherentLabel",
    "coherent_state",
    "displace",
    "default_phase_grid",
    "expect_direct",
    "expect_at",
    "thread_count",
]


def thread_count() -> int:
    """Worker cap for explicit pools; set PSQM_THREADS to override."""
    env = os.environ.get("PSQM_THREADS")
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


@dataclass(frozen=True)
class CoherentLabel:
    """Phase-space centre ``(q, p)``, one component per mode."""

    q: tuple[float, ...]
    p: tuple[float, ...]

    @classmethod
    def at(cls, q, p) -> "CoherentLabel":
        q = tuple(np.atleast_1d(np.asarray(q, dtype=float)))
        p = tuple(np.atleast_1d(np.asarray(p, dtype=float)))
        if len(q) != len(p):
            raise ValueError("q and p need the same number of components")
        return cls(q, p)

    @property
    def modes(self) -> int:
        return len(self.q)

    @property
    def w(self) -> np.ndarray:
        """Complex identification q + ip."""
        return np.asarray(self.q) + 1j * np.asarray(self.p)


def coherent_state(line: SampledLine, q, p) -> StateVector:
    """Unit-norm Gaussian packet centred at ``(q, p)``; rejects centres outside the window."""
    label = CoherentLabel.at(q, p)
    if any(abs(v) > line.half_width for v in label.q + label.p):
        raise ValueError("centre lies outside the grid window")
    x = line.points
    values = np.ones(1, dtype=np.complex128)
    for qk, pk in zip(label.q, label.p):
        factor = np.pi**-0.25 * np.exp(1j * pk * (x - qk / 2.0)) * np.exp(-0.5 * (x - qk) ** 2)
        values = np.multiply.outer(values, factor)
    tag = "coherent(" + ", ".join(f"{qk:g}{pk:+g}j" for qk, pk in zip(label.q, label.p)) + ")"
    return StateVector(line, values.reshape(-1), modes=label.modes, meta={"label": tag})


def displace(w: complex, psi: StateVector) -> StateVector:
    r"""Phase-space translation :math:`(U_w \psi)(x) = e^{i p (x - q/2)} \psi(x - q)`, ``w = q + ip``.

    The shift is spectral on a zero-padded line; ``meta['clipped_mass']``
    records the squared mass pushed outside the original window.
    """
    if psi.modes != 1:
        raise NotImplementedError("displacement is implemented for one mode")
    q, p = float(np.real(w)), float(np.imag(w))
    line = psi.line
    wide = line.padded()
    k = wide.index_of(line)
    padded = np.zeros(wide.n, dtype=np.complex128)
    padded[k : k + line.n] = psi.values
    spec = fourier_axis(padded, 0, wide)
    spec *= np.exp(-1j * q * wide.dual.points)
    shifted = fourier_axis(spec, 0, wide.dual, wide, inverse=True)
    total = wide.step * np.vdot(shifted, shifted).real
    kept = shifted[k : k + line.n]
    clipped = total - wide.step * np.vdot(kept, kept).real
    values = kept * np.exp(1j * p * (line.points - q / 2.0))
    return StateVector(line, values, meta={"clipped_mass": max(0.0, float(clipped))})


def default_phase_grid(line: SampledLine) -> PhaseGrid:
    """Half-window, half-resolution phase plane; keeps packet tails on-grid."""
    inner = SampledLine(line.half_width / 2.0, line.n // 2, line.offset)
    return PhaseGrid((inner, inner))


def expect_direct(op: OperatorMatrix, grid: PhaseGrid | None = None) -> PhaseFunction:
    """Expectation field by one quadratic form per phase point.

    Work is a dense product per momentum row; rows are distributed over
    a thread pool (see :func:`thread_count`).
    """
    if op.modes != 1:
        raise NotImplementedError("direct expectation is implemented for one mode")
    line = op.line
    if grid is None:
        grid = default_phase_grid(line)
    qs = grid.axes[0].points
    ps = grid.axes[1].points
    x = line.points
    envelope = np.pi**-0.25 * np.exp(-0.5 * (x[:, None] - qs[None, :]) ** 2)
    out = np.empty((qs.size, ps.size), dtype=np.complex128)

    def fill(block: range) -> None:
        for j in block:
            packet = np.exp(1j * ps[j] * x)[:, None] * envelope
            image = op.matrix @ packet
            out[:, j] = line.step * np.einsum("iq,iq->q", packet.conj(), image)

    workers = min(thread_count(), ps.size)
    if workers <= 1:
        fill(range(ps.size))
    else:
        blocks = [range(j, ps.size, workers) for j in range(workers)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, blocks))
    return PhaseFunction(grid, out, {}, provenance="direct")


def expect_at(op: OperatorMatrix, q, p) -> complex:
    """Single-point expectation against the packet centred at ``(q, p)``."""
    theta = coherent_state(op.line, q, p)
    return theta.inner(op.apply(theta))
