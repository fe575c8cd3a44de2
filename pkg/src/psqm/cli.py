"""Command line front end.

Every subcommand reads and writes the delimited formats from
:mod:`psqm.io`; ``verify`` and ``pair`` also emit a JSON report with
plot-ready CSV companions and rendered figures.  Exit codes: 0 for
success, 1 when a report contains failed checks, 2 for usage or input
format problems, 3 when a numerical alarm fires.
"""

from __future__ import annotations

import argparse
import sys

from .coherent import coherent_state, expect_direct
from .duality import pair as pair_value
from .duality import pairing_multiplier
from .grids import SampledLine
from .io import FormatError, read_field, read_operator, read_state, write_field, write_operator, write_state
from .numerics import NumericalAlarm
from .report import Check, Curve, VerifyReport, write_report
from .scenarios import SUITE_NAMES, ScenarioConfig, run_scenario
from .star import bracket, star_kernel_route, star_operator_route
from .transforms import expect_kernel_route, expectation_inverse, husimi, weyl_quantize, wigner

__all__ = ["build_parser", "main"]


def _phase_input(path):
    """Field CSV passes through; an operator CSV is sent through the transform."""
    with open(path, encoding="ascii") as fh:
        head = fh.readline()
    if "view: matrix" in head:
        return expect_kernel_route(read_operator(path))
    return read_field(path)


def _parse_windows(text: str) -> tuple[int, ...]:
    try:
        windows = tuple(int(tok) for tok in text.split(","))
    except ValueError:
        raise ValueError(f"bad window list {text!r} (expected e.g. 4,6,8)") from None
    if not windows:
        raise ValueError("empty window list")
    return windows


def _parse_grid_spec(text: str) -> dict:
    overrides = {}
    for token in text.split(","):
        key, sep, val = token.partition("=")
        if not sep:
            raise ValueError(f"bad grid token {token!r} (expected n=<int> or L=<float>)")
        if key == "n":
            overrides["n"] = int(val)
        elif key == "L":
            overrides["half_width"] = float(val)
        else:
            raise ValueError(f"unknown grid key {key!r} (known: n, L)")
    return overrides


def _cmd_coherent(args) -> int:
    line = SampledLine(args.L, args.n)
    write_state(args.out, coherent_state(line, args.q, args.p))
    return 0


def _cmd_expect(args) -> int:
    op = read_operator(args.op)
    field = expect_kernel_route(op) if args.route == "kernel" else expect_direct(op)
    write_field(args.out, field)
    return 0


def _cmd_wigner(args) -> int:
    psi = read_state(args.psi)
    phi = read_state(args.phi) if args.phi else None
    write_field(args.out, wigner(psi, phi))
    return 0


def _cmd_husimi(args) -> int:
    psi = read_state(args.psi)
    phi = read_state(args.phi) if args.phi else None
    write_field(args.out, husimi(psi, phi))
    return 0


def _cmd_weyl(args) -> int:
    write_operator(args.out, weyl_quantize(read_field(args.symbol)))
    return 0


def _cmd_invert(args) -> int:
    write_operator(args.out, expectation_inverse(read_field(args.phase), args.N))
    return 0


def _cmd_product(args) -> int:
    a, b = _phase_input(args.a), _phase_input(args.b)
    if args.route == "operator":
        out = star_operator_route(a, b, cutoff_n=args.N)
    else:
        out = star_kernel_route(a, b, args.N)
    write_field(args.out, out)
    return 0


def _cmd_bracket(args) -> int:
    write_field(args.out, bracket(_phase_input(args.h), _phase_input(args.g)))
    return 0


def _cmd_pair(args) -> int:
    phi, psi = read_state(args.phi), read_state(args.psi)
    op = read_operator(args.op)
    windows = _parse_windows(args.N)
    field = expect_kernel_route(op)
    want = phi.inner(op.apply(psi))
    errs = [
        abs(pair_value(pairing_multiplier(phi, psi, n), field) - want) for n in windows
    ]
    guard = 1.0 + abs(want)
    steps = [b - a for a, b in zip(errs, errs[1:])]
    worst_step = max(steps) if steps else 0.0
    ladder_text = "; ".join(f"window {n}: {e:.6g}" for n, e in zip(windows, errs))
    verdict = "non-increasing" if worst_step <= 0.0 else "an increasing step"
    checks = (
        Check(
            name="pairing-top-window",
            anchor="pairing-battery",
            value=errs[-1] / guard,
            target=0.0,
            tolerance=1e-2,
            passed=errs[-1] / guard <= 1e-2,
            detail=f"matrix element {want:.6g}; error at window {windows[-1]}, "
            f"guarded by 1 + its magnitude",
        ),
        Check(
            name="pairing-ladder-monotone",
            anchor="pairing-ladder",
            value=worst_step,
            target=0.0,
            tolerance=0.0,
            passed=worst_step <= 0.0,
            detail=f"{ladder_text}; the ladder shows {verdict}",
            curve=Curve(
                name="pairing-ladder",
                columns=("window", "absolute error"),
                rows=tuple((float(n), e) for n, e in zip(windows, errs)),
                kind="semilogy",
            ),
        ),
    )
    report = VerifyReport(
        scenario="pair",
        seed=0,
        grid={"m": op.modes, "L": op.line.half_width, "n": op.line.n},
        ladder=windows,
        checks=checks,
    )
    if args.report:
        write_report(report, args.report, figures=not args.no_figures)
    for line in report.summary_lines():
        print(line)
    return 0 if report.passed else 1


def _cmd_verify(args) -> int:
    overrides = _parse_grid_spec(args.grid) if args.grid else {}
    config = ScenarioConfig(seed=args.seed, **overrides)
    report = run_scenario(args.suite, config)
    if args.report:
        write_report(report, args.report, figures=not args.no_figures)
    for line in report.summary_lines():
        print(line)
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="psqm",
        description="Coherent-state expectation fields: transforms, functionals, products.",
        epilog="exit codes: 0 success, 1 failed checks, 2 usage or format error, 3 numerical alarm",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coherent", help="write a Gaussian packet state")
    p.add_argument("--q", type=float, required=True, help="position centre")
    p.add_argument("--p", type=float, required=True, help="momentum centre")
    p.add_argument("--L", type=float, default=8.0, help="window half width (default 8)")
    p.add_argument("--n", type=int, default=128, help="samples per axis (default 128)")
    p.add_argument("--out", required=True, help="output state CSV")
    p.set_defaults(handler=_cmd_coherent)

    p = sub.add_parser("expect", help="expectation field of an operator")
    p.add_argument("--op", required=True, help="operator CSV")
    p.add_argument("--route", choices=("kernel", "direct"), default="kernel",
                   help="kernel transform on the native grid, or pointwise forms")
    p.add_argument("--out", required=True, help="output field CSV")
    p.set_defaults(handler=_cmd_expect)

    p = sub.add_parser("wigner", help="Wigner transform of a state pair")
    p.add_argument("--psi", required=True, help="state CSV")
    p.add_argument("--phi", help="optional second state CSV (defaults to psi)")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_wigner)

    p = sub.add_parser("husimi", help="Gaussian-smoothed Wigner transform")
    p.add_argument("--psi", required=True, help="state CSV")
    p.add_argument("--phi", help="optional second state CSV (defaults to psi)")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_husimi)

    p = sub.add_parser("weyl", help="quantize a mid-point symbol")
    p.add_argument("--symbol", required=True, help="symbol field CSV")
    p.add_argument("--out", required=True, help="output operator CSV")
    p.set_defaults(handler=_cmd_weyl)

    p = sub.add_parser("invert", help="reconstruct an operator from its expectation field")
    p.add_argument("--phase", required=True, help="expectation field CSV on the native grid")
    p.add_argument("--N", type=int, default=None, help="deconvolution window (default 9)")
    p.add_argument("--out", required=True, help="output operator CSV")
    p.set_defaults(handler=_cmd_invert)

    p = sub.add_parser("product", help="star product of two expectation fields")
    p.add_argument("--a", required=True, help="left factor (field or operator CSV)")
    p.add_argument("--b", required=True, help="right factor (field or operator CSV)")
    p.add_argument("--route", choices=("operator", "kernel"), default="operator",
                   help="invert-multiply-transform, or the sharpened integral kernel")
    p.add_argument("--N", type=int, default=8, help="deconvolution window (default 8)")
    p.add_argument("--out", required=True, help="output field CSV")
    p.set_defaults(handler=_cmd_product)

    p = sub.add_parser("bracket", help="scaled commutator field i(HG - GH)")
    p.add_argument("--h", required=True, help="left field or operator CSV")
    p.add_argument("--g", required=True, help="right field or operator CSV")
    p.add_argument("--out", required=True, help="output field CSV")
    p.set_defaults(handler=_cmd_bracket)

    p = sub.add_parser("pair", help="dual pairing of a state pair against an operator field")
    p.add_argument("--phi", required=True, help="left state CSV")
    p.add_argument("--psi", required=True, help="right state CSV")
    p.add_argument("--op", required=True, help="operator CSV")
    p.add_argument("--N", default="4,6,8", help="window ladder (default 4,6,8)")
    p.add_argument("--report", help="write a JSON report (CSV and figures alongside)")
    p.add_argument("--no-figures", action="store_true", help="skip figure rendering")
    p.set_defaults(handler=_cmd_pair)

    p = sub.add_parser("verify", help="run a named check suite")
    p.add_argument("--suite", required=True, choices=SUITE_NAMES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid", help="overrides, e.g. n=64,L=8")
    p.add_argument("--report", help="write a JSON report (CSV and figures alongside)")
    p.add_argument("--no-figures", action="store_true", help="skip figure rendering")
    p.set_defaults(handler=_cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except NumericalAlarm as exc:
        print(f"psqm: numerical alarm: {exc}", file=sys.stderr)
        return 3
    except (FormatError, ValueError, NotImplementedError, OSError) as exc:
        print(f"psqm: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
