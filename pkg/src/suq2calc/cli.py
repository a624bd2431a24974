"""Command-line front end: normalize, apply, check, conventions, dims."""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from .freealg import Element, format_element, parse_element
from .qfield import QScalar
from .rewrite import MissingRelation, StepLimitExceeded
from .scalar_text import ParseError

SUITES = ("rtt-confluence", "action-table", "eigen", "leibnitz", "lie", "jacobi", "munu",
          "delta", "ideal", "forms", "d2", "cartan-maurer")
EXTRA_SUITES = ("b-bracket", "dj", "classical-limit", "volume", "d-omega", "dT")
OPERATORS = ("Dpp", "Dmm", "D0", "mu", "nu", "d")
SIGMA4_ONLY = ("d2", "cartan-maurer", "d-omega", "dT")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--max-degree", type=int, default=3)
    common.add_argument("--sigma", type=int, default=4)
    common.add_argument("--p", type=int, default=None, help="odd integer (default: -1, 1, 3)")
    common.add_argument("--s", type=int, default=1)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--max-steps", type=int, default=10**6)
    common.add_argument("--strict", action="store_true")
    common.add_argument("--q", default=None, help="evaluate output coefficients at this rational q")
    common.add_argument("--verbose", action="store_true", help="list passing relations too")

    parser = _Parser(prog="suq2calc", description=__doc__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    p = sub.add_parser("normalize", parents=[common], help="normal form of an expression")
    p.add_argument("expr")
    p.add_argument("--weak", action="store_true", help="also reduce modulo det_q = 1")
    p = sub.add_parser("apply", parents=[common], help="apply an operator product")
    p.add_argument("op", help="product of " + ", ".join(OPERATORS) + ", e.g. Dpp*D0")
    p.add_argument("expr")
    p = sub.add_parser("check", parents=[common], help="run a verification suite")
    p.add_argument("suite", choices=SUITES + EXTRA_SUITES + ("all",))
    p.add_argument("--jobs", type=int, default=0, help="worker processes for 'all' (0: auto)")
    p = sub.add_parser("conventions", parents=[common], help="resolve the conventions")
    p.add_argument("action", choices=("solve",))
    p = sub.add_parser("dims", parents=[common], help="dimension counts")
    p.add_argument("--forms", action="store_true", required=True)
    p.add_argument("--omitted", action="store_true",
                   help="include the non-gauge-covariant w0 w0 relation")
    return parser


# -- sessions -----------------------------------------------------------------------------

def _calculus(opts):
    """The validated calculus with the requested step limit (the shared copy is not touched)."""
    from dataclasses import replace

    from .conventions import validated_calculus
    from .rewrite import IdealReducer

    calc = validated_calculus()
    limit = opts["max_steps"]
    if calc.full.step_limit == limit:
        return calc
    coord = calc.coordinate.with_options(step_limit=limit)
    return replace(calc, coordinate=coord,
                   derivative=calc.derivative.with_options(step_limit=limit),
                   mixed=calc.mixed.with_options(step_limit=limit),
                   full=calc.full.with_options(step_limit=limit),
                   ideal=IdealReducer(calc.ix.det, coord))


def _algebra(opts, include_omitted=False, strict=False):
    from .forms import build_sigma_algebra

    alg = build_sigma_algebra(opts["sigma"], _calculus(opts), include_omitted)
    if strict:
        alg.full = alg.full.with_options(strict=True)
    return alg


def run_suite(name, opts):
    """Run one named suite; ``opts`` carries the numeric flags."""
    from . import calculus as K
    from . import forms as F
    from .conventions import check_rtt_confluence

    deg = opts["max_degree"]
    if name in SIGMA4_ONLY and opts["sigma"] != 4:
        raise UsageError(f"suite {name} is defined only at --sigma 4")
    if name == "rtt-confluence":
        return check_rtt_confluence(_calculus(opts), seed=opts["seed"])
    if name in ("forms", "d2", "cartan-maurer", "classical-limit", "volume", "d-omega", "dT"):
        alg = _algebra(opts)
        if name == "forms":
            return F.check_forms(alg)
        if name == "d2":
            return F.check_d_squared(alg, deg)[0]
        if name == "cartan-maurer":
            return F.cartan_maurer(alg).report
        if name == "classical-limit":
            return F.check_classical_limit(alg)
        if name == "volume":
            return F.volume_dominance(alg, projected=True)
        if name == "d-omega":
            return F.cross_validate_d_omega(alg)
        return F.d_t_cross_check(alg)
    calc = _calculus(opts)
    if name == "action-table":
        return K.check_action_table(calc)
    if name == "eigen":
        return K.check_eigen_D0(calc, deg)
    if name == "leibnitz":
        return K.check_leibnitz(calc, deg)
    if name == "lie":
        return K.check_qlie_and_jacobi(calc, "representation", deg)
    if name == "jacobi":
        return K.check_qlie_and_jacobi(calc, "abstract", deg, seed=opts["seed"])
    if name == "munu":
        return K.check_mu_nu(calc, deg)
    if name == "delta":
        ps = (-1, 1, 3) if opts["p"] is None else (opts["p"],)
        if any(p % 2 == 0 for p in ps):
            raise UsageError("--p must be odd")
        return K.check_delta_family(calc, ps, opts["s"])
    if name == "ideal":
        return K.check_ideal_stability(calc, deg)
    if name == "b-bracket":
        return K.check_b_bracket(calc)
    if name == "dj":
        return K.dj_d0(calc)
    raise UsageError(f"unknown suite {name}")


def _worker(args):
    name, opts = args
    try:
        return name, run_suite(name, opts), None
    except StepLimitExceeded as exc:
        return name, None, str(exc)


def _options(args):
    return {"max_degree": args.max_degree, "sigma": args.sigma, "p": args.p, "s": args.s,
            "seed": args.seed, "max_steps": args.max_steps}


# -- output -------------------------------------------------------------------------------

def _specialize(e, q):
    """Coefficients of ``e`` evaluated at the rational ``q``."""
    value = Fraction(q)
    return Element({w: QScalar.from_fraction(c.evaluate(value)) for w, c in e.items()})


def _emit_element(e, args, out):
    if args.q is not None:
        e = _specialize(e, args.q)
    if args.format == "json":
        out.write(json.dumps({"result": format_element(e)}) + "\n")
    else:
        out.write(format_element(e) + "\n")


def _emit_reports(reports, args, out):
    if args.format == "json":
        data = [r.to_dict() for r in reports]
        out.write(json.dumps(data[0] if len(data) == 1 else
                             {"status": "pass" if all(r.ok for r in reports) else "fail",
                              "suites": data}, indent=2) + "\n")
        return
    for r in reports:
        out.write(r.to_text(args.verbose) + "\n")
        if r.suite == "d2" and "rho" in r.data:
            out.write(f"  rho = {r.data['rho']}\n")
    if len(reports) > 1:
        bad = [r.suite for r in reports if not r.ok]
        out.write(f"{len(reports) - len(bad)}/{len(reports)} suites passed"
                  + (f"; failing: {', '.join(bad)}" if bad else "") + "\n")


# -- commands -----------------------------------------------------------------------------

def _cmd_normalize(args, out):
    opts = _options(args)
    alg = _algebra(opts, strict=args.strict)
    e = alg.full.normalize(parse_element(args.expr))
    if args.weak:
        e = alg.calc.ideal.reduce(e)
    _emit_element(e, args, out)
    return 0


def _cmd_apply(args, out):
    from .calculus import Operators

    names = [n.strip() for n in args.op.split("*")]
    for n in names:
        if n not in OPERATORS:
            raise UsageError(f"unknown operator {n!r}; expected one of {', '.join(OPERATORS)}")
    opts = _options(args)
    alg = _algebra(opts, strict=args.strict)
    e = alg.full.normalize(parse_element(args.expr))
    ops = Operators(alg.calc)
    d = None
    for n in reversed(names):
        if n == "d":
            if d is None:
                from .forms import ExteriorDerivative
                if alg.sigma != 4:
                    raise UsageError("d is defined only at --sigma 4")
                d = ExteriorDerivative(alg, ops=ops)
            e = alg.calc.ideal.reduce(alg.full.normalize(d(e)))
        else:
            e = ops.apply(n, e)
    _emit_element(e, args, out)
    return 0


def _cmd_check(args, out):
    opts = _options(args)
    if args.q is not None:
        raise UsageError("checks run in exact generic-q mode only; --q applies to "
                         "normalize and apply")
    names = SUITES if args.suite == "all" else (args.suite,)
    jobs = args.jobs or min(len(names), os.cpu_count() or 1)
    if len(names) > 1 and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_worker, [(n, opts) for n in names]))
    else:
        results = [_worker((n, opts)) for n in names]
    reports = []
    for name, rep, err in results:
        if err is not None:
            _emit_reports(reports, args, out)
            print(f"error: suite {name}: {err}", file=sys.stderr)
            return 3
        reports.append(rep)
    _emit_reports(reports, args, out)
    return 0 if all(r.ok for r in reports) else 1


def _cmd_conventions(args, out):
    from .conventions import ConventionError, solve_conventions

    try:
        conv, rep = solve_conventions(args.max_degree)
    except ConventionError as exc:
        _emit_reports([exc.report], args, out)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _emit_reports([rep], args, out)
    return 0


def _cmd_dims(args, out):
    from .forms import classical_two_form_dimension, two_form_dimension

    opts = _options(args)
    alg = _algebra(opts, include_omitted=args.omitted)
    dim, basis, _ = two_form_dimension(alg)
    classical = classical_two_form_dimension(args.sigma, args.omitted)
    words = ["*".join(w) for w in basis]
    if args.format == "json":
        out.write(json.dumps({"sigma": args.sigma, "omitted_relation": args.omitted,
                              "degree": 2, "dimension": dim, "basis": words,
                              "classical_dimension": classical,
                              "convention_fingerprint": alg.fingerprint}, indent=2) + "\n")
    else:
        out.write(f"sigma={args.sigma} degree-2 forms: dimension {dim}\n")
        out.write("basis: " + ", ".join(words) + "\n")
        out.write(f"dimension with all relations at q=1: {classical}\n")
    return 0


COMMANDS = {"normalize": _cmd_normalize, "apply": _cmd_apply, "check": _cmd_check,
            "conventions": _cmd_conventions, "dims": _cmd_dims}


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required: " + ", ".join(COMMANDS))
        return COMMANDS[args.command](args, out)
    except (UsageError, ParseError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"usage error: {msg}", file=sys.stderr)
        return 2
    except StepLimitExceeded as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return 3
    except MissingRelation as exc:
        print(f"missing relation: {exc}", file=sys.stderr)
        return 1
    except (ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
