from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

import mpmath
import pytest

from equising.numbers import SurdNumber
from equising.staircase import WeightSpec

RADICANDS = (2, 3, 5, 6, 7, 10)


# ---- random instance generators --------------------------------------------


def random_rational(rng: random.Random, lo: float, hi: float, max_den: int = 6) -> Fraction:
    while True:
        q = rng.randint(1, max_den)
        p = rng.randint(math.ceil(lo * q), math.floor(hi * q)) if math.ceil(lo * q) <= math.floor(hi * q) else None
        if p is not None and lo <= p / q <= hi and p > 0:
            return Fraction(p, q)


def random_exponent(rng: random.Random, hi: float = 6.0, irrational: bool | None = None) -> SurdNumber:
    """A positive rational or quadratic surd in (0, hi]."""
    if irrational is None:
        irrational = rng.random() < 0.6
    if not irrational:
        return SurdNumber.rational(random_rational(rng, 0.5, hi))
    while True:
        d = rng.choice(RADICANDS)
        b = Fraction(rng.choice([-1, 1]) * rng.randint(1, 4), rng.randint(1, 3))
        a = Fraction(rng.randint(0, 8), rng.randint(1, 2))
        x = SurdNumber({1: a, d: b})
        if 0.3 < float(x) <= hi:
            return x


def random_weight(rng: random.Random, m: int | None = None, hi: float = 6.0, irrational: bool | None = None) -> WeightSpec:
    m = m or rng.randint(1, 3)
    return WeightSpec(tuple(random_exponent(rng, hi, irrational) for _ in range(m)))


def boundary_instance(rng: random.Random, hi: float = 6.0) -> tuple[tuple[int, ...], WeightSpec]:
    """``(alpha, w)`` with ``sum (alpha_i+1)/a_i = 1`` exactly.

    Reciprocals ``u_i = (alpha_i+1)/a_i`` are chosen to sum to 1, sometimes
    with a cancelling pair of surd parts so the ``a_i`` are irrational.
    """
    while True:
        m = rng.randint(1, 3)
        alpha = tuple(rng.randint(0, 1) for _ in range(m))
        if m == 1:
            us = [SurdNumber.rational(1)]
        else:
            cuts = sorted(Fraction(rng.randint(1, 11), 12) for _ in range(m - 1))
            parts = [b - a for a, b in zip([Fraction(0)] + cuts, cuts + [Fraction(1)])]
            us = [SurdNumber.rational(p) for p in parts]
            if rng.random() < 0.6:
                d = rng.choice(RADICANDS)
                e = Fraction(rng.randint(1, 3), rng.randint(4, 12))
                us[0] = us[0] + SurdNumber({d: e})
                us[1] = us[1] - SurdNumber({d: e})
        if any(u.sign() <= 0 for u in us):
            continue
        a = [(k + 1) * u.reciprocal() for k, u in zip(alpha, us)]
        if all(float(x) <= hi for x in a):
            return alpha, WeightSpec(tuple(a))


# ---- independent numeric oracles -------------------------------------------


def iv_value(x: SurdNumber, dps: int = 50):
    iv = mpmath.iv
    saved, iv.dps = iv.dps, dps
    try:
        total = iv.mpf(0)
        for d, q in x.terms:
            total += iv.mpf(q.numerator) / q.denominator * iv.sqrt(d)
        return total
    finally:
        iv.dps = saved


def brute_nonmembers(w: WeightSpec, t: Fraction | int = 1) -> set[tuple[int, ...]]:
    """Non-member exponents by plain box enumeration with 60-digit floats.

    Exact boundary sums are only produced by the rational-weight or
    constructed-boundary generators, so ties are resolved with a tolerance
    of 1e-40 and treated as non-members.
    """
    with mpmath.workdps(60):
        a = [x.to_mpf(60) for x in w.a]
        bound = mpmath.mpf(Fraction(t).numerator) / Fraction(t).denominator
        box = [int(mpmath.floor(bound * x)) + 1 for x in a]
        out = set()
        for alpha in itertools.product(*(range(b + 1) for b in box)):
            s = mpmath.fsum((k + 1) / x for k, x in zip(alpha, a))
            if s <= bound + mpmath.mpf(10) ** -40:
                out.add(alpha)
    return out


# ---- acceptance summary -----------------------------------------------------

ACCEPTANCE_LINES: dict[str, str] = {}


@pytest.fixture
def criterion_log():
    def log(key: str, passed: bool, detail: str) -> None:
        ACCEPTANCE_LINES[key] = f"{'PASS' if passed else 'FAIL'}  {key}: {detail}"

    return log


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
