"""Command-line front end.

    equising decide  -a "1+sqrt(2)" -a "1+1/2*sqrt(2)"
    equising ideal   -a 2 -a 2 [-t 3/4]
    equising epsilon -a "2*sqrt(2)" -a "2*sqrt(2)"
    equising approx  -a "sqrt(2)" -a "sqrt(2)" -K 3
    equising verify  -a "sqrt(2)" -a "sqrt(2)" [--sequence seq.json]
    equising gcurve  -a 2 -a 2 --alpha 0,0
    equising probe   -a 2 -a 2 --alpha 1,0

Exit codes: 0 success, 1 usage or parse error, 2 resource cap hit,
3 precondition violated, 4 verification failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from . import __version__
from .approximation import ApproxSequence, build_sequence, verify_sequence
from .caps import use_caps
from .decision import Outcome, decide, verify_verdict
from .errors import (
    EquisingError,
    NonPositiveWeight,
    PreconditionError,
    ResourceCapError,
    UsageError,
    VerificationError,
)
from .numbers import SurdNumber, parse_surd
from .oracle import DEFAULT_GRID, g_curve_check, integrability_probe
from .staircase import WeightSpec, epsilon0, jumping_numbers, lct, nonmembers

SCHEMA = "equising/1"
VERBS = ("decide", "ideal", "epsilon", "approx", "verify", "gcurve", "probe")

EXIT_OK, EXIT_USAGE, EXIT_CAP, EXIT_PRECONDITION, EXIT_VERIFY = range(5)


def parse_weight(text: str) -> SurdNumber:
    """Parse a weight expression; it must denote a positive number."""
    x = parse_surd(text)
    if x.sign() <= 0:
        raise NonPositiveWeight(f"weight {text!r} = {x} is not positive")
    return x


@dataclass
class Command:
    verb: str
    weights: list[str]
    options: dict[str, Any] = field(default_factory=dict)


class _ArgumentError(UsageError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # exit code 1 instead of argparse's 2
        raise _ArgumentError(message)


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace(" ", "").split(",") if x != "")
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _rational_list(text: str) -> tuple[Fraction, ...]:
    try:
        return tuple(Fraction(x) for x in text.replace(" ", "").split(",") if x != "")
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated rationals, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("-a", "--weight", action="append", default=[], metavar="EXPR",
                        help="exponent a_i (repeat once per coordinate)")
    common.add_argument("-n", "--dim", type=int, default=None, help="ambient dimension n >= m")
    common.add_argument("--rho", type=Fraction, default=Fraction(1, 2),
                        help="polydisc radius of the trailing coordinates (default 1/2)")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--max-box", type=int, default=None, help="enumeration box cap (default 1e8)")
    common.add_argument("--max-bits", type=int, default=None, help="sign refinement cap in bits (default 4096)")
    common.add_argument("--max-primes", type=int, default=None, help="prime support cap for reciprocals (default 4)")
    common.add_argument("--threads", type=int, default=1, help="worker cap")

    parser = _Parser(prog="equising", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    sub.add_parser("decide", parents=[common], help="decide approximability with a certificate")
    p = sub.add_parser("ideal", parents=[common], help="non-members and generators of I(t*phi)")
    p.add_argument("-t", "--scale", default="1", help="scale t (surd expression, default 1)")
    sub.add_parser("epsilon", parents=[common], help="equisingularity margin eps0")
    for name, helptext in (("approx", "build an approximating sequence"),
                           ("verify", "verify an approximating sequence")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("-K", type=int, default=8, help="number of terms (default 8)")
        p.add_argument("--epsilon", default=None, help="window eps (default eps0/2)")
        if name == "verify":
            p.add_argument("--sequence", default=None, help="JSON file with a sequence to verify")
            p.add_argument("--samples", type=int, default=100)
            p.add_argument("--seed", type=int, default=0)
    p = sub.add_parser("gcurve", parents=[common], help="concavity check of G(-log r)")
    p.add_argument("--alpha", type=_int_list, required=True)
    p.add_argument("--grid", type=_rational_list, default=DEFAULT_GRID)
    p = sub.add_parser("probe", parents=[common], help="dyadic-shell integrability probe")
    p.add_argument("--alpha", type=_int_list, required=True)
    return parser


def command_from_args(ns: argparse.Namespace) -> Command:
    opts = {k: v for k, v in vars(ns).items() if k not in ("verb", "weight")}
    return Command(ns.verb, list(ns.weight), opts)


def _weight_spec(cmd: Command) -> WeightSpec:
    if not cmd.weights:
        raise UsageError("at least one weight (-a) is required")
    return WeightSpec(tuple(parse_weight(t) for t in cmd.weights), cmd.options.get("dim"),
                      cmd.options.get("rho", Fraction(1, 2)))


def _frac(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# ---- verbs -----------------------------------------------------------------


def _decide(w: WeightSpec, cmd: Command) -> tuple[int, dict]:
    verdict = decide(w)
    ok = verify_verdict(w, verdict)
    report = verdict.to_dict() | {"certificate_verified": ok}
    return (EXIT_OK if ok else EXIT_VERIFY), report


def _ideal(w: WeightSpec, cmd: Command) -> tuple[int, dict]:
    t = parse_surd(cmd.options.get("scale", "1"))
    stair = nonmembers(w, t)
    return EXIT_OK, stair.to_dict() | {"lct": str(lct(w)), "digest": stair.digest()}


def _epsilon(w: WeightSpec, cmd: Command) -> tuple[int, dict]:
    eps = epsilon0(w)
    jumps = jumping_numbers(w, 1)
    return EXIT_OK, {
        "epsilon0": None if eps is None else str(eps),
        "epsilon0_decimal": None if eps is None else format(float(eps), ".17g"),
        "jumping_numbers": [str(s) for s in jumps],
    }


def _approx(w: WeightSpec, cmd: Command) -> tuple[int, dict]:
    seq = build_sequence(w, cmd.options.get("K", 8), cmd.options.get("epsilon"))
    ok = all(c.passed for c in seq.certificates)
    return (EXIT_OK if ok else EXIT_VERIFY), seq.to_dict() | {"certificates_passed": ok}


def _verify(w: WeightSpec, cmd: Command) -> tuple[int, dict]:
    path = cmd.options.get("sequence")
    if path:
        with open(path) as fh:
            data = json.load(fh)
        seq = ApproxSequence.from_dict(data.get("result", data))
    else:
        seq = build_sequence(w, cmd.options.get("K", 8), cmd.options.get("epsilon"))
    report = verify_sequence(seq, w, cmd.options.get("samples", 100), cmd.options.get("seed", 0),
                             raise_on_failure=False)
    return (EXIT_OK if report.passed else EXIT_VERIFY), {"sequence": seq.to_dict(), **report.to_dict()}


def _gcurve(w: WeightSpec, cmd: Command) -> tuple[int, dict]:
    check = g_curve_check(cmd.options["alpha"], w, cmd.options.get("grid", DEFAULT_GRID))
    return (EXIT_OK if check.passed else EXIT_VERIFY), check.to_dict()


def _probe(w: WeightSpec, cmd: Command) -> tuple[int, dict]:
    return EXIT_OK, integrability_probe(cmd.options["alpha"], w).to_dict()


_HANDLERS = {
    "decide": _decide,
    "ideal": _ideal,
    "epsilon": _epsilon,
    "approx": _approx,
    "verify": _verify,
    "gcurve": _gcurve,
    "probe": _probe,
}


def run(cmd: Command) -> tuple[int, dict]:
    """Execute ``cmd``; return the exit code and the JSON-ready report."""
    report: dict[str, Any] = {"schema": SCHEMA, "command": cmd.verb, "weights": []}
    try:
        if cmd.verb not in _HANDLERS:
            raise UsageError(f"unknown verb {cmd.verb!r}")
        opts = cmd.options
        with use_caps(max_box=opts.get("max_box"), max_bits=opts.get("max_bits"),
                      max_primes=opts.get("max_primes")):
            w = _weight_spec(cmd)
            report["weights"] = [str(x) for x in w.a]
            report["n"] = w.n
            code, result = _HANDLERS[cmd.verb](w, cmd)
    except (UsageError, ValueError, ZeroDivisionError, OSError, KeyError) as exc:
        code, result = EXIT_USAGE, _error(exc)
    except ResourceCapError as exc:
        code, result = EXIT_CAP, _error(exc)
    except PreconditionError as exc:
        code, result = EXIT_PRECONDITION, _error(exc)
    except VerificationError as exc:
        code, result = EXIT_VERIFY, _error(exc)
    except EquisingError as exc:  # pragma: no cover - all subclasses handled above
        code, result = EXIT_USAGE, _error(exc)
    report["exit_code"] = code
    report["result"] = result
    return code, report


def _error(exc: Exception) -> dict:
    return {"error": type(exc).__name__, "message": str(exc)}


# ---- text rendering ----------------------------------------------------------


def _tuples(items) -> str:
    return "[" + ", ".join("(" + ",".join(str(k) for k in t) + ")" for t in items) + "]"


def render_text(report: dict) -> str:
    res = report["result"]
    head = f"weights a = ({', '.join(report['weights'])})" if report["weights"] else ""
    if "error" in res:
        return f"{head}\nerror: {res['error']}: {res['message']}".strip()
    verb = report["command"]
    lines = [head]
    if verb == "decide":
        cert = res["certificate"]
        lines.append(f"outcome: {res['outcome']}")
        if res["outcome"] == Outcome.ANALYTIC.value:
            ratios = ", ".join(cert["ratios"])
            label = "(1')" if all("sqrt" not in w for w in report["weights"]) else "(1)"
            lines.append(f"condition {label} holds: a_i = c * q_i with c = {cert['c']}, q = ({ratios})")
        elif res["outcome"] == Outcome.DIOPHANTINE.value:
            lines.append("condition (1) fails: a_{} / a_{} = {} is irrational".format(
                cert["irrational_pair"]["i"] + 1, cert["irrational_pair"]["j"] + 1, cert["irrational_pair"]["ratio"]))
            lines.append(f"condition (2) holds: sum x_i/a_i = 1 has no positive integer solution "
                         f"({cert['reason']}, box {cert['box']})")
        else:
            pair = cert["irrational_pair"]
            lines.append(f"condition (1) fails: a_{pair['i'] + 1} / a_{pair['j'] + 1} = {pair['ratio']} is irrational")
            lines.append(f"condition (2) fails: x = {tuple(cert['solution'])} solves sum x_i/a_i = 1")
        lines.append(f"maximal equisingular: {'yes' if res['maximal'] else 'no'}"
                     + (f" (x = {tuple(res['unit_solution'])})" if res["unit_solution"] else ""))
        lines.append(f"certificate verified: {'yes' if res['certificate_verified'] else 'NO'}")
    elif verb == "ideal":
        lines.append(f"scale t = {res['scale']}, lct = {res['lct']}")
        lines.append(f"nonmembers: {_tuples(res['nonmembers'])}")
        lines.append(f"generators: {_tuples(res['generators'])}")
    elif verb == "epsilon":
        if res["epsilon0"] is None:
            lines.append("epsilon0: none (sum (alpha_i+1)/a_i = 1 is attained; the ideal jumps at t = 1)")
        else:
            lines.append(f"epsilon0 = {res['epsilon0']} ~ {res['epsilon0_decimal']}")
        lines.append("jumping numbers <= 1: " + (", ".join(res["jumping_numbers"]) or "none"))
    elif verb in ("approx", "verify"):
        seq = res if verb == "approx" else res["sequence"]
        lines.append(f"mode: {seq['mode']}, epsilon = {seq['epsilon']}")
        for k, term in enumerate(seq["terms"], 1):
            lines.append(f"  a^({k}) = ({', '.join(term)})")
        if verb == "approx":
            lines.append(f"certificates: {'all pass' if res['certificates_passed'] else 'FAILED'}")
        else:
            lines.append(f"certificates: {'ok' if res['certificates_ok'] else 'MISMATCH ' + str(res['mismatched_terms'])}")
            lines.append(f"window: {'ok' if res['window_ok'] else 'VIOLATED ' + str(res['window_violations'])}")
            lines.append(f"monotonicity: {len(res['violations'])} violations at {res['samples']} points (seed {res['seed']})")
            for v in res["violations"][:5]:
                lines.append(f"  sample {v['sample']}: {v['lhs']} > {v['rhs']} at |z| = {v['point_moduli']}")
    elif verb == "gcurve":
        curve = res["curve"]
        lines.append(f"alpha = {tuple(curve['alpha'])}, s = {curve['s']}, maximal_flag = {curve['maximal_flag']}")
        for row in curve["grid"]:
            lines.append(f"  r = {row['r']:>5}  G = {row['G']}")
        lines.append(f"concave: {res['concave']}, G >= r*G(0): {res['lower_bound']}, "
                     f"equality on grid: {res['equality_on_grid']}")
        lines.append("PASS" if res["passed"] else "FAIL: " + "; ".join(res["failures"]))
    elif verb == "probe":
        lines.append(f"s = {res['exponent']}: {res['verdict']} "
                     f"(shell ratios in [{res['min_ratio']}, {res['max_ratio']}], {res['shells']} shells)")
    return "\n".join(line for line in lines if line)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except _ArgumentError as exc:
        parser.print_usage(sys.stderr)
        print(f"equising: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    cmd = command_from_args(ns)
    code, report = run(cmd)
    if cmd.options.get("format") == "json":
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        out = render_text(report)
        print(out, file=sys.stderr if code in (EXIT_USAGE, EXIT_CAP, EXIT_PRECONDITION) else sys.stdout)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
