"""Acceptance gate: one test per advertised criterion.

Each test pulls its rows from the named check suites, pins the stated
tolerance, and fails loudly with the measured values.  Criterion 8's
first row states a proportionality the transform does not satisfy; the
suite measures the factor that actually holds and the test here stays
red rather than restating the relation with the measured constant.
"""

import pytest

from psqm.scenarios import run_scenario

_REPORTS = {}


def rows(suite):
    if suite not in _REPORTS:
        _REPORTS[suite] = {c.name: c for c in run_scenario(suite).checks}
    return _REPORTS[suite]


def gate(suite, wanted):
    picked = [(name, tol, rows(suite)[name]) for name, tol in wanted]
    lines = []
    bad = []
    for name, tol, check in picked:
        assert check.tolerance == tol, f"{name}: expected tolerance {tol}"
        status = "pass" if check.passed else "FAIL"
        lines.append(f"{status}  {name}  value {check.value:.3e}  tolerance {tol:.1e}")
        if not check.passed:
            bad.append(f"{name}: {check.value:.3e} exceeds {tol:.1e} ({check.detail})")
    print("\n".join(lines))
    assert not bad, "; ".join(bad)


def test_criterion_01_packet_family():
    gate("exercise6", [("packet-norm", 1e-10), ("packet-transform-rotation", 1e-8)])


def test_criterion_02_expectation_laws():
    gate(
        "exercise6",
        [
            ("position-function-smoothing", 1e-6),
            ("momentum-function-smoothing", 1e-6),
            ("packet-overlap-law", 1e-10),
            ("quadratic-moment", 1e-6),
        ],
    )
    assert "q^2" in rows("exercise6")["quadratic-moment"].detail


def test_criterion_03_positivity_and_order():
    gate(
        "exercise6",
        [
            ("psd-expectation-floor", 1e-10),
            ("expectation-order", 1e-10),
            ("spectral-family-monotone", 1e-10),
        ],
    )


def test_criterion_04_route_equivalence():
    gate("theorem8", [("transform-route-equivalence", 1e-6)])


def test_criterion_05_inverse_round_trip():
    gate("inverse", [("round-trip-oscillator-span", 1e-3)])


def test_criterion_06_pairing_battery():
    gate("pairing", [("pairing-battery-top-window", 1e-2), ("pairing-ladder-monotone", 0.0)])


def test_criterion_07_functional_evaluation():
    gate("pairing", [("point-evaluation-functional", 1e-3), ("first-excited-functional", 1e-3)])


def test_criterion_08_transform_bridges():
    gate("remark17", [("weyl-expectation-smoothing", 1e-5), ("bridge-relations", 1e-3)])
    factor_row = rows("remark17")["packet-husimi-factor"]
    assert not factor_row.passed
    pytest.fail(
        "stated smoothing proportionality does not hold: " + factor_row.detail,
        pytrace=False,
    )


def test_criterion_09_product_algebra():
    gate(
        "star",
        [
            ("product-isomorphism", 1e-3),
            ("product-associativity", 1e-3),
            ("bracket-antisymmetry", 1e-10),
            ("bracket-commutator-consistency", 1e-3),
        ],
    )


def test_criterion_10_product_quadrature_route():
    gate("star", [("quadrature-route-agreement", 5e-2)])
    assert "jointly" in rows("star")["quadrature-route-agreement"].detail
