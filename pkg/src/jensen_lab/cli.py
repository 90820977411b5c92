"""Command-line entry point: ``jensen-lab <subcommand> ...``.

Exit status: 0 when the inequality holds or the construction is valid,
2 when a violation is found (the report carries the witness), 1 on usage or
input errors.
"""
import argparse
import os
import sys

import numpy as np

from . import io
from .columns import augment_to_unital, canonical_dilation, gram_and_classify, unitarity_residual
from .errors import FormatError, JensenLabError
from .functions import catalog, lookup, parse_expression
from .inequalities import (
    isometry_defect,
    jensen_operator_defect,
    operator_convexity_defect,
    pinching_defect,
    replay_pinching_chain,
    trace_jensen_report,
    two_point_reduction,
)
from .prober import ProbeConfig, probe
from .spectral import DEFAULT_TOL, REAL_LINE, Interval
from .states import conditional_expectation, field_jensen_gap

EXIT_OK, EXIT_ERROR, EXIT_VIOLATION = 0, 1, 2

INEQUALITIES = ("eq3", "eq5", "eq6", "eq7", "eq8", "eq9", "pinch", "chain16", "twopoint")

_TOL_KEYS = {"herm": "herm", "eig": "eig", "order": "order", "eq": "eq",
             "tau_herm": "herm", "tau_eig": "eig", "tau_order": "order", "tau_eq": "eq"}


def _default_seed():
    raw = os.environ.get("JENSEN_LAB_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise FormatError("JENSEN_LAB_SEED", f"not an integer: {raw!r}") from None


def _tolerances(pairs):
    overrides = {}
    for pair in pairs or ():
        key, _, value = pair.partition("=")
        if key not in _TOL_KEYS or not value:
            raise FormatError("--tol", f"expected KEY=VALUE with KEY in herm/eig/order/eq, got {pair!r}")
        try:
            overrides[_TOL_KEYS[key]] = float(value)
        except ValueError:
            raise FormatError("--tol", f"not a number: {value!r}") from None
    try:
        return DEFAULT_TOL.with_overrides(**overrides)
    except ValueError as exc:
        raise FormatError("--tol", str(exc)) from None


def _function(args):
    domain = Interval.closed(*args.domain) if getattr(args, "domain", None) else None
    if getattr(args, "bs", None):
        f = io.rep_from_json(io.load_json(args.bs, "--bs")).as_function(os.path.basename(args.bs))
    elif getattr(args, "expr", None):
        f = parse_expression(args.expr, domain or REAL_LINE)
    elif getattr(args, "fn", None):
        try:
            f = lookup(args.fn)
        except KeyError:
            names = ", ".join(g.name for g in catalog())
            raise FormatError("--fn", f"unknown function {args.fn!r}; known: {names}") from None
    else:
        raise FormatError("--fn", "one of --fn, --expr or --bs is required")
    if domain is not None:
        f = f.with_domain(domain)
    return f


def _need(args, name):
    value = getattr(args, name)
    if value is None:
        raise FormatError(f"--{name}", "required for this subcommand")
    return value


def _matrix(args, name):
    return io.matrix_from_json(io.load_json(_need(args, name), f"--{name}"), name)


def _column(args):
    return io.column_from_json(io.load_json(_need(args, "col"), "--col"))


def _xs(args, col, optional=False):
    if args.xs is None:
        if optional:
            return np.zeros((col.n, col.m, col.m), dtype=complex)
        raise FormatError("--xs", "required for this subcommand")
    return io.matrices_from_json(io.load_json(args.xs, "--xs"))


def _emit(payload, args):
    text = io.dumps(payload)
    print(text)
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text + "\n")


def cmd_probe(args, tol):
    f = _function(args)
    interval = Interval.closed(*args.interval)
    seed = _default_seed() if args.seed is None else args.seed
    config = ProbeConfig(f, interval, tuple(args.orders), args.trials, seed=seed,
                         refine_budget=args.budget, threshold=args.threshold,
                         max_counterexamples=args.max_counterexamples)
    report = probe(config)
    _emit(report.to_dict(), args)
    return EXIT_VIOLATION if report.found else EXIT_OK


def cmd_verify(args, tol):
    ineq = args.ineq
    if ineq == "eq9":
        fld = io.field_from_json(io.load_json(_need(args, "field"), "--field"))
        if args.algebra:
            alg = io.algebra_from_json(io.load_json(args.algebra, "--algebra"))
            density = _matrix(args, "state") if args.state else None
            state = alg.state(density)
        else:
            state = io.state_from_json(io.load_json(_need(args, "state"), "--state"))
        report = field_jensen_gap(_function(args), fld, state, tol=tol)
    elif ineq == "eq3":
        report = operator_convexity_defect(_function(args), _matrix(args, "x"), _matrix(args, "y"),
                                           _need(args, "lam"), tol=tol)
    elif ineq in ("eq5", "eq6"):
        col = _column(args)
        mode = "unital" if ineq == "eq5" else "contractive"
        report = jensen_operator_defect(_function(args), col, _xs(args, col, ineq == "eq6"),
                                        mode, tol=tol)
    elif ineq in ("eq7", "eq8"):
        col = _column(args)
        mode = "unital" if ineq == "eq7" else "contractive"
        report = trace_jensen_report(_function(args), col, _xs(args, col, ineq == "eq8"), mode,
                                     tol=tol)
    elif ineq == "pinch":
        f, x = _function(args), _matrix(args, "x")
        if args.v:
            report = isometry_defect(f, x, _matrix(args, "v"), tol=tol)
        else:
            report = pinching_defect(f, x, _matrix(args, "p"), args.s, tol=tol)
    elif ineq == "chain16":
        col = _column(args)
        report = replay_pinching_chain(_function(args), col, _xs(args, col), s=args.s, tol=tol)
    elif ineq == "twopoint":
        report = two_point_reduction(_matrix(args, "x"), _matrix(args, "y"), _need(args, "lam"),
                                     _function(args), s=args.s, tol=tol)
    else:  # argparse restricts choices
        raise FormatError("--ineq", f"unknown inequality {ineq!r}")
    _emit(report.to_dict(), args)
    return EXIT_OK if report.holds else EXIT_VIOLATION


def cmd_dilate(args, tol):
    col = _column(args)
    cls = gram_and_classify(col, tol)
    augmented = cls.kind == "contractive"
    if augmented:
        col = augment_to_unital(col, tol)
    U = canonical_dilation(col, tol)
    r = unitarity_residual(U)
    valid = r <= 1e-10 * (col.n + 1) * np.sqrt(col.m)
    _emit({"unitary": io.matrix_to_json(U), "residual": r, "augmented": augmented,
           "valid": bool(valid)}, args)
    return EXIT_OK if valid else EXIT_VIOLATION


def cmd_expect(args, tol):
    state = io.state_from_json(io.load_json(_need(args, "state"), "--state"))
    table = conditional_expectation(state, _matrix(args, "y"), _matrix(args, "x"), tol)
    _emit(table.to_dict(), args)
    return EXIT_OK


def cmd_trace_witness(args, tol):
    col = _column(args)
    report = trace_jensen_report(_function(args), col, _xs(args, col, args.mode == "contractive"),
                                 args.mode, with_atoms=True, tol=tol)
    _emit(report.to_dict(), args)
    return EXIT_OK if report.holds else EXIT_VIOLATION


def _add_function_args(p):
    p.add_argument("--fn", help="catalog function name")
    p.add_argument("--expr", help="arithmetic expression in t, e.g. 't**2 + 1'")
    p.add_argument("--bs", help="integral-representation JSON file")
    p.add_argument("--domain", nargs=2, type=float, metavar=("LO", "HI"),
                   help="closed domain override for the function")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="jensen-lab",
        description="Numerical checks of Jensen-type operator and trace inequalities.",
        epilog="exit status: 0 holds, 2 violation found, 1 usage or input error")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", action="append", metavar="KEY=VALUE",
                        help="override a tolerance (herm, eig, order, eq)")
    common.add_argument("--out", help="also write the JSON report to FILE")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("probe", parents=[common], help="search for convexity violations")
    _add_function_args(p)
    p.add_argument("--interval", nargs=2, type=float, required=True, metavar=("LO", "HI"))
    p.add_argument("--orders", nargs="+", type=int, default=[1, 2])
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=None, help="default: $JENSEN_LAB_SEED or 0")
    p.add_argument("--budget", type=int, default=200, help="refinement steps per counterexample")
    p.add_argument("--threshold", type=float, default=1e-6)
    p.add_argument("--max-counterexamples", type=int, default=1)
    p.set_defaults(handler=cmd_probe)

    p = sub.add_parser("verify", parents=[common], help="evaluate one inequality on an instance")
    p.add_argument("--ineq", required=True, choices=INEQUALITIES, help=(
        "eq3 operator convexity (--x --y --lam); eq5/eq6 Jensen operator inequality, "
        "unital/contractive (--col --xs); eq7/eq8 trace form (--col --xs); eq9 field "
        "under a state (--field --state or --algebra); pinch pinching or isometry form "
        "(--x with --p or --v); chain16 dilation-and-pinching replay (--col --xs [--s]); "
        "twopoint two-point reduction (--x --y --lam)"))
    _add_function_args(p)
    for name in ("col", "xs", "x", "y", "p", "v", "field", "state", "algebra"):
        p.add_argument(f"--{name}", help=f"{name} JSON file")
    p.add_argument("--lam", type=float)
    p.add_argument("--s", type=float, help="reference scalar for pinching / chain evaluations")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("dilate", parents=[common], help="canonical unitary dilation of a column")
    p.add_argument("--col", required=True)
    p.set_defaults(handler=cmd_dilate)

    p = sub.add_parser("expect", parents=[common], help="conditional expectation table")
    for name in ("state", "y", "x"):
        p.add_argument(f"--{name}", required=True)
    p.set_defaults(handler=cmd_expect)

    p = sub.add_parser("trace-witness", parents=[common], help="per-eigenvector measure audit")
    _add_function_args(p)
    p.add_argument("--col", required=True)
    p.add_argument("--xs")
    p.add_argument("--mode", choices=("unital", "contractive"), default="unital")
    p.set_defaults(handler=cmd_trace_witness)
    return parser


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    try:
        tol = _tolerances(args.tol)
        return args.handler(args, tol)
    except JensenLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
