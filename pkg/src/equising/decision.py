"""Decide whether a toric weight has decreasing equisingular approximations
with analytic singularities, and emit re-checkable certificates.

The weight ``log sum |z_i|^{a_i}`` is approximable iff

  (1) all ratios ``a_i/a_1`` are rational (the weight has analytic
      singularities), or
  (2) ``sum x_i/a_i = 1`` has no solution in positive integers.

Solvability of that unit equation is also exactly maximal equisingularity.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from . import caps
from .errors import BoxTooLarge
from .numbers import SurdNumber
from .staircase import WeightSpec, lct


class Outcome(str, enum.Enum):
    ANALYTIC = "ApproximableAnalytic"
    DIOPHANTINE = "ApproximableDiophantine"
    NOT_APPROXIMABLE = "NotApproximable"


@dataclass(frozen=True)
class ScaleWitness:
    c: SurdNumber
    ratios: tuple[Fraction, ...]

    def to_dict(self) -> dict:
        return {
            "kind": "scale",
            "c": str(self.c),
            "ratios": [_frac(q) for q in self.ratios],
        }


@dataclass(frozen=True)
class IrrationalPair:
    i: int
    j: int
    ratio: SurdNumber

    def to_dict(self) -> dict:
        return {"i": self.i, "j": self.j, "ratio": str(self.ratio)}


@dataclass(frozen=True)
class InfeasibilityCertificate:
    """Why ``sum x_i/a_i = 1`` has no positive integer solution.

    ``reason`` is ``"lct>1"`` (already ``sum 1/a_i > 1``), ``"empty-box"``
    (some ``a_i < 1``) or ``"exhaustive"`` (every point of ``box`` fails one of
    the per-radicand equations in ``table``).
    """

    reason: str
    box: tuple[int, ...]
    reciprocals: tuple[SurdNumber, ...]
    table: dict[int, tuple[Fraction, ...]]
    irrational_pair: IrrationalPair

    def to_dict(self) -> dict:
        return {
            "kind": "infeasible",
            "reason": self.reason,
            "box": list(self.box),
            "reciprocals": [str(r) for r in self.reciprocals],
            "radicand_equations": {
                str(d): {"coefficients": [_frac(q) for q in row], "target": "1" if d == 1 else "0"}
                for d, row in sorted(self.table.items())
            },
            "irrational_pair": self.irrational_pair.to_dict(),
        }


@dataclass(frozen=True)
class SolutionCertificate:
    solution: tuple[int, ...]
    irrational_pair: IrrationalPair

    def to_dict(self) -> dict:
        return {
            "kind": "solution",
            "solution": list(self.solution),
            "irrational_pair": self.irrational_pair.to_dict(),
        }


Certificate = ScaleWitness | InfeasibilityCertificate | SolutionCertificate


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    certificate: Certificate
    maximal: bool
    unit_solution: tuple[int, ...] | None = field(default=None)

    @property
    def approximable(self) -> bool:
        return self.outcome is not Outcome.NOT_APPROXIMABLE

    def to_dict(self) -> dict:
        return {
            "outcome": self.outcome.value,
            "certificate": self.certificate.to_dict(),
            "maximal": self.maximal,
            "unit_solution": None if self.unit_solution is None else list(self.unit_solution),
        }


def _frac(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def analytic_witness(w: WeightSpec) -> ScaleWitness | None:
    c = w.a[0]
    ratios = []
    for x in w.a:
        q = x / c
        if not q.is_rational:
            return None
        ratios.append(q.rational_part)
    return ScaleWitness(c, tuple(ratios))


def irrational_pair(w: WeightSpec) -> IrrationalPair | None:
    for j in range(1, w.m):
        q = w.a[0] / w.a[j]
        if not q.is_rational:
            return IrrationalPair(0, j, q)
    return None


def _radicand_table(recips: tuple[SurdNumber, ...]) -> dict[int, tuple[Fraction, ...]]:
    rads = sorted({1} | {d for r in recips for d in r.radicands})
    return {d: tuple(r.coefficient(d) for r in recips) for d in rads}


def _box(w: WeightSpec) -> tuple[int, ...]:
    box = tuple(x.floor() for x in w.a)
    if all(b > 0 for b in box):
        size = math.prod(box)
        limit = caps.current().max_box
        if size > limit:
            raise BoxTooLarge(f"solution box {box} has {size} points, cap is {limit}")
    return box


def _search(w: WeightSpec) -> Iterator[tuple[int, ...]]:
    """Lexicographic walk of ``1 <= x_i <= floor(a_i)`` treating the equation as
    one rational linear constraint per radicand (rational part 1, every
    ``sqrt(d)`` part 0), pruned by the attainable range of the remaining terms."""
    box = _box(w)
    if any(b < 1 for b in box) or (lct(w) - 1).sign() > 0:
        return
    table = _radicand_table(w.reciprocals)
    rads = list(table)
    target = {d: Fraction(1 if d == 1 else 0) for d in rads}
    m = w.m
    lo = {d: [Fraction(0)] * (m + 1) for d in rads}
    hi = {d: [Fraction(0)] * (m + 1) for d in rads}
    for d in rads:
        for i in range(m - 1, -1, -1):
            c = table[d][i]
            ends = (c, c * box[i])
            lo[d][i] = lo[d][i + 1] + min(ends)
            hi[d][i] = hi[d][i + 1] + max(ends)

    def walk(i: int, prefix: tuple[int, ...], partial: dict[int, Fraction]) -> Iterator[tuple[int, ...]]:
        if i == m:
            if all(partial[d] == target[d] for d in rads):
                yield prefix
            return
        # the last coordinate is forced by any radicand it touches
        if i == m - 1:
            forced = None
            for d in rads:
                c = table[d][i]
                if c:
                    x = (target[d] - partial[d]) / c
                    if x.denominator != 1 or not 1 <= x <= box[i]:
                        return
                    forced = int(x)
                    break
            choices = range(1, box[i] + 1) if forced is None else (forced,)
        else:
            choices = range(1, box[i] + 1)
        for x in choices:
            nxt = {d: partial[d] + x * table[d][i] for d in rads}
            if all(lo[d][i + 1] <= target[d] - nxt[d] <= hi[d][i + 1] for d in rads):
                yield from walk(i + 1, prefix + (x,), nxt)

    yield from walk(0, (), {d: Fraction(0) for d in rads})


def unit_solutions(w: WeightSpec, find_all: bool = True) -> list[tuple[int, ...]]:
    """Positive integer solutions of ``sum x_i/a_i = 1`` in lexicographic order."""
    out = []
    for x in _search(w):
        out.append(x)
        if not find_all:
            break
    return out


def classify_maximal(w: WeightSpec) -> bool:
    return bool(unit_solutions(w, find_all=False))


def decide(w: WeightSpec) -> Verdict:
    found = unit_solutions(w, find_all=False)
    maximal = bool(found)
    solution = found[0] if found else None
    witness = analytic_witness(w)
    if witness is not None:
        return Verdict(Outcome.ANALYTIC, witness, maximal, solution)
    pair = irrational_pair(w)
    assert pair is not None
    if not found:
        box = tuple(x.floor() for x in w.a)
        if any(b < 1 for b in box):
            reason = "empty-box"
        elif (lct(w) - 1).sign() > 0:
            reason = "lct>1"
        else:
            reason = "exhaustive"
        cert = InfeasibilityCertificate(
            reason, box, w.reciprocals, _radicand_table(w.reciprocals), pair
        )
        return Verdict(Outcome.DIOPHANTINE, cert, False, None)
    return Verdict(Outcome.NOT_APPROXIMABLE, SolutionCertificate(solution, pair), True, solution)


# ---- independent re-verification -----------------------------------------
#
# These avoid reciprocals and the pruned search: a solution is checked in the
# cleared-denominator form  sum_i x_i * prod_{j != i} a_j = prod_j a_j.


def _prod(xs) -> SurdNumber:
    out = SurdNumber.rational(1)
    for x in xs:
        out = out * x
    return out


def check_solution(w: WeightSpec, x: tuple[int, ...]) -> bool:
    if len(x) != w.m or any(k < 1 for k in x):
        return False
    lhs = SurdNumber()
    for i, k in enumerate(x):
        lhs = lhs + k * _prod(w.a[:i] + w.a[i + 1:])
    return lhs == _prod(w.a)


def check_scale_witness(w: WeightSpec, cert: ScaleWitness) -> bool:
    return (
        cert.c.sign() > 0
        and len(cert.ratios) == w.m
        and all(q > 0 and q * cert.c == x for q, x in zip(cert.ratios, w.a))
    )


def check_irrational_pair(w: WeightSpec, pair: IrrationalPair) -> bool:
    return pair.ratio * w.a[pair.j] == w.a[pair.i] and not pair.ratio.is_rational


def check_infeasible(w: WeightSpec, cert: InfeasibilityCertificate) -> bool:
    if cert.box != tuple(x.floor() for x in w.a):
        return False
    if cert.reason == "empty-box":
        return any(b < 1 for b in cert.box)
    if cert.reason == "lct>1":
        others = sum((_prod(w.a[:i] + w.a[i + 1:]) for i in range(w.m)), SurdNumber())
        return (others - _prod(w.a)).sign() > 0
    ranges = [range(1, b + 1) for b in cert.box]
    return not any(check_solution(w, x) for x in itertools.product(*ranges))


def verify_verdict(w: WeightSpec, verdict: Verdict) -> bool:
    cert = verdict.certificate
    if verdict.outcome is Outcome.ANALYTIC:
        ok = isinstance(cert, ScaleWitness) and check_scale_witness(w, cert)
    elif verdict.outcome is Outcome.DIOPHANTINE:
        ok = (
            isinstance(cert, InfeasibilityCertificate)
            and not verdict.maximal
            and check_irrational_pair(w, cert.irrational_pair)
            and check_infeasible(w, cert)
        )
    else:
        ok = (
            isinstance(cert, SolutionCertificate)
            and verdict.maximal
            and check_solution(w, cert.solution)
            and check_irrational_pair(w, cert.irrational_pair)
        )
    if verdict.unit_solution is not None:
        ok = ok and verdict.maximal and check_solution(w, verdict.unit_solution)
    return ok
