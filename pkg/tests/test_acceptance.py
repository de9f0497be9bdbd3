"""Acceptance criteria 1-7, each at its stated tolerance and runtime bound.

Every test records one PASS/FAIL line through ``criterion_log``; the lines
are printed in the "acceptance criteria" section of the pytest summary.
"""

import itertools
import random
import time
from fractions import Fraction

import mpmath
import pytest

from conftest import RADICANDS, boundary_instance, brute_nonmembers, iv_value, random_rational, random_weight
from equising.approximation import build_sequence, verify_sequence
from equising.decision import (
    Outcome,
    analytic_witness,
    check_scale_witness,
    check_solution,
    classify_maximal,
    decide,
    unit_solutions,
    verify_verdict,
)
from equising.numbers import SurdNumber, mul, reciprocal
from equising.oracle import (
    DEFAULT_GRID,
    ProbeVerdict,
    Region,
    closed_form_mass,
    g_curve_check,
    integrability_probe,
    mc_mass,
)
from equising.staircase import WeightSpec, contains, epsilon0, exponent_sum, ideal_equal, nonmembers

R2 = SurdNumber.sqrt(2)


def W(*a):
    return WeightSpec.of(*a)


# ---- 1. canonical verdict suite ----------------------------------------------

VERDICTS = [
    ("a=(2,3)", (2, 3), Outcome.ANALYTIC),
    ("a=(sqrt2,2sqrt2)", ("sqrt(2)", "2*sqrt(2)"), Outcome.ANALYTIC),
    ("a=(sqrt2,sqrt2)", ("sqrt(2)", "sqrt(2)"), Outcome.DIOPHANTINE),
    ("a=(1+sqrt2,1+sqrt2/2)", ("1+sqrt(2)", "1+1/2*sqrt(2)"), Outcome.NOT_APPROXIMABLE),
]


def _independent_recheck(w: WeightSpec, verdict) -> bool:
    """Re-derive each certificate from the weight alone, without the checkers
    used by ``decide``."""
    cert = verdict.certificate
    if verdict.outcome is Outcome.ANALYTIC:
        return all(x == cert.c * q and q.is_rational for x, q in zip(w.a, map(SurdNumber.rational, cert.ratios)))
    if verdict.outcome is Outcome.DIOPHANTINE:
        pair = cert.irrational_pair
        box = [x.floor() for x in w.a]
        none = not any(sum((Fraction(1) * k * x.reciprocal() for k, x in zip(xs, w.a)), SurdNumber()) == 1
                       for xs in itertools.product(*(range(1, b + 1) for b in box)))
        return none and pair is not None and not (w.a[pair.i] / w.a[pair.j]).is_rational
    lhs = sum((k * x.reciprocal() for k, x in zip(cert.solution, w.a)), SurdNumber())
    return lhs == 1 and not cert.irrational_pair.ratio.is_rational


@pytest.mark.parametrize("label, a, expected", VERDICTS, ids=[v[0] for v in VERDICTS])
def test_criterion_1_verdict_suite(label, a, expected, criterion_log):
    start = time.perf_counter()
    w = W(*a)
    v = decide(w)
    extra = True
    if expected is Outcome.NOT_APPROXIMABLE:
        extra = v.certificate.solution == (1, 1) and v.certificate.irrational_pair.ratio == R2
    elif expected is Outcome.ANALYTIC and v.outcome is Outcome.ANALYTIC:
        extra = check_scale_witness(w, v.certificate)
    ok = v.outcome is expected and extra and verify_verdict(w, v) and _independent_recheck(w, v)
    elapsed = time.perf_counter() - start
    criterion_log(f"1 verdict {label}", ok and elapsed < 1.0,
                  f"expected {expected.value}, got {v.outcome.value}; {elapsed * 1000:.0f} ms")
    assert v.outcome is expected
    assert ok and elapsed < 1.0


# ---- 2. membership oracle agreement -------------------------------------------


def _membership_cases(rng: random.Random, total: int = 200, boundary: int = 40):
    cases = [boundary_instance(rng) + (True,) for _ in range(boundary)]
    while len(cases) < total:
        w = random_weight(rng, hi=6.0)
        # exponents straddling the threshold, not just far-off members
        alpha = tuple(rng.randint(0, max(0, x.floor())) for x in w.a)
        cases.append((alpha, w, False))
    return cases


def test_criterion_2_membership_agrees_with_probe(criterion_log):
    start = time.perf_counter()
    cases = _membership_cases(random.Random(2024))
    mismatches, inconclusive, boundary_bad = [], 0, []
    for alpha, w, on_boundary in cases:
        member = contains(alpha, w, 1)
        probe = integrability_probe(alpha, w).verdict
        if on_boundary and (probe is not ProbeVerdict.DIVERGENT or member):
            boundary_bad.append((alpha, [str(x) for x in w.a]))
        if probe is ProbeVerdict.INCONCLUSIVE:
            inconclusive += 1
        elif member != (probe is ProbeVerdict.CONVERGENT):
            mismatches.append((alpha, [str(x) for x in w.a]))
    elapsed = time.perf_counter() - start
    nb = sum(c[2] for c in cases)
    ok = not mismatches and not boundary_bad and nb >= 20 and len(cases) == 200 and elapsed < 30
    criterion_log("2 membership", ok, f"{len(cases)} pairs ({nb} boundary), {len(mismatches)} mismatches, "
                  f"{inconclusive} inconclusive, {len(boundary_bad)} bad boundary; {elapsed:.1f} s")
    assert not mismatches and not boundary_bad
    assert nb >= 20 and elapsed < 30


# ---- 3. integral identity ------------------------------------------------------


def _mass_cases(rng: random.Random, total: int = 50):
    cases = []
    while len(cases) < total:
        w = random_weight(rng, m=rng.randint(1, 3), hi=6.0)
        alpha = tuple(rng.randint(0, 2) for _ in range(w.m))
        r = Fraction(rng.randint(1, 9), 10)
        cases.append((alpha, w, r))
    return cases


def test_criterion_3_integral_identity(criterion_log):
    start = time.perf_counter()
    rng = random.Random(33)
    within, reruns, band_fail = 0, 0, []
    for idx, (alpha, w, r) in enumerate(_mass_cases(rng)):
        exact = float(closed_form_mass(alpha, w, r).value())
        rep = mc_mass(alpha, w, r, Region.MAX, N=100_000, seed=idx)
        if abs(rep.mc_estimate - exact) > 3 * rep.mc_stderr:
            reruns += 1
            rep = mc_mass(alpha, w, r, Region.MAX, N=100_000, seed=10_000 + idx)
        within += abs(rep.mc_estimate - exact) <= 3 * rep.mc_stderr
        lo = float(closed_form_mass(alpha, w, r / w.m**2).value())
        srep = mc_mass(alpha, w, r, Region.SUM, N=100_000, seed=idx)
        if not lo - 3 * srep.mc_stderr <= srep.mc_estimate <= exact + 3 * srep.mc_stderr:
            band_fail.append(idx)
    elapsed = time.perf_counter() - start
    ok = within >= 49 and not band_fail and elapsed < 120
    criterion_log("3 integral identity", ok, f"{within}/50 Max within 3 sigma ({reruns} reruns), "
                  f"{len(band_fail)} Sum band failures; {elapsed:.1f} s")
    assert within >= 49 and not band_fail
    assert elapsed < 120


# ---- 4. concavity suite --------------------------------------------------------


def test_criterion_4_concavity(criterion_log):
    start = time.perf_counter()
    rng = random.Random(44)
    cases = [boundary_instance(rng) for _ in range(12)]
    while len(cases) < 50:
        w = random_weight(rng, hi=6.0)
        outside = nonmembers(w).nonmembers
        if outside:
            cases.append((rng.choice(outside), w))
    bad, s_one = [], 0
    for alpha, w in cases:
        chk = g_curve_check(alpha, w, DEFAULT_GRID, rtol=1e-9)
        s_is_one = exponent_sum(alpha, w) == 1
        good = chk.concave and chk.lower_bound and chk.equality_on_grid == s_is_one
        if s_is_one:
            s_one += 1
            good = good and classify_maximal(w) and check_solution(w, tuple(k + 1 for k in alpha))
        if not good:
            bad.append((alpha, [str(x) for x in w.a]))
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 10
    criterion_log("4 concavity", ok, f"50 non-members ({s_one} with s=1), {len(bad)} failures; {elapsed:.1f} s")
    assert not bad and elapsed < 10


# ---- 5. epsilon0 correctness ---------------------------------------------------


def _brute_gap(w: WeightSpec) -> tuple[SurdNumber, SurdNumber]:
    """``(s*, delta)`` from plain enumeration: the largest sub-threshold sum
    and half its distance to the next smaller distinct sum (or to 0)."""
    inv = [x.reciprocal() for x in w.a]
    sums = {sum((Fraction(k + 1) * u for k, u in zip(alpha, inv)), SurdNumber()) for alpha in brute_nonmembers(w)}
    ordered = sorted(sums, key=lambda s: s.to_mpf(60))
    s_star = ordered[-1]
    below = ordered[-2] if len(ordered) > 1 else SurdNumber()
    return s_star, (s_star - below) / 2


def test_criterion_5_epsilon0(criterion_log):
    start = time.perf_counter()
    rng = random.Random(55)
    spot = epsilon0(W("2*sqrt(2)", "2*sqrt(2)"))
    spot_ok = spot == 1 - R2 / 2
    checked, bad = 0, []
    while checked < 30:
        w = random_weight(rng, hi=6.0)
        if unit_solutions(w) or not brute_nonmembers(w):
            continue
        checked += 1
        eps = epsilon0(w)
        s_star, delta = _brute_gap(w)
        good = eps is not None and eps == 1 - s_star
        good = good and ideal_equal(w, 1, 1 - eps) and not ideal_equal(w, 1, 1 - eps - delta)
        if not good:
            bad.append([str(x) for x in w.a])
    elapsed = time.perf_counter() - start
    ok = spot_ok and not bad and elapsed < 10
    criterion_log("5 epsilon0", ok, f"spot eps0(2sqrt2,2sqrt2) = {spot}; {checked} infeasible weights, "
                  f"{len(bad)} failures; {elapsed:.1f} s")
    assert spot_ok and not bad and elapsed < 10


# ---- 6. approximation sequences ------------------------------------------------


def test_criterion_6_approximation(criterion_log):
    start = time.perf_counter()
    rng = random.Random(66)
    instances = [W("sqrt(2)", "sqrt(2)"), W("2*sqrt(2)", "2*sqrt(2)")]
    while len(instances) < 10:
        w = random_weight(rng, hi=6.0, irrational=True)
        if decide(w).outcome is not Outcome.NOT_APPROXIMABLE:
            instances.append(w)
    bad, violations = [], 0
    for w in instances:
        seq = build_sequence(w, 8)
        good = all(c.passed for c in seq.certificates)
        for k, term in enumerate(seq.terms, 1):
            for i, (q, x) in enumerate(zip(term, w.a)):
                good = good and ((1 - seq.epsilon) * x - q).sign() < 0 and (x - q).sign() > 0
                good = good and (x - q - seq.epsilon * x / 2**k).sign() <= 0
                if k > 1:
                    good = good and q > seq.terms[k - 2][i]
        report = verify_sequence(seq, w, samples=100, seed=0, raise_on_failure=False)
        violations += len(report.violations)
        if not (good and report.passed):
            bad.append([str(x) for x in w.a])
    elapsed = time.perf_counter() - start
    ok = not bad and violations == 0 and elapsed < 30
    criterion_log("6 approximation", ok, f"10 irrational instances, K=8, {len(bad)} failing, "
                  f"{violations} monotonicity violations at 100 points each; {elapsed:.1f} s")
    assert not bad and violations == 0 and elapsed < 30


# ---- 7. arithmetic kernel ------------------------------------------------------


def _random_surd(rng: random.Random) -> SurdNumber:
    # radicands over the primes 2, 3, 5, 7 stay inside the default prime cap
    pool = [1, 2, 3, 5, 6, 7, 10, 14, 15, 21, 30, 35, 42, 70, 105, 210]
    terms = {d: random_rational(rng, -5, 5, 9) * rng.choice([-1, 1]) for d in rng.sample(pool, rng.randint(1, 5))}
    return SurdNumber(terms)


def test_criterion_7_arithmetic_kernel(criterion_log):
    start = time.perf_counter()
    rng = random.Random(77)
    roundtrip_bad = sign_bad = floor_bad = 0
    for _ in range(1000):
        x = _random_surd(rng)
        if x.is_zero:
            x = x + 1
        roundtrip_bad += mul(x, reciprocal(x)) != 1
        v = iv_value(x)
        expected = 1 if v.a > 0 else -1 if v.b < 0 else None
        sign_bad += expected is None or x.sign() != expected
        lo, hi = int(mpmath.floor(v.a)), int(mpmath.floor(v.b))
        floor_bad += lo == hi and x.floor() != lo
    scale_bad = 0
    for _ in range(500):
        d = rng.choice(RADICANDS)
        c = random_rational(rng, 0.2, 3) * SurdNumber.sqrt(d)
        w = WeightSpec(tuple(c * random_rational(rng, 0.2, 3) for _ in range(rng.randint(1, 3))))
        wit = analytic_witness(w)
        if wit is None or wit.c.is_rational or unit_solutions(w):
            scale_bad += 1
    elapsed = time.perf_counter() - start
    ok = not (roundtrip_bad or sign_bad or floor_bad or scale_bad) and elapsed < 10
    criterion_log("7 arithmetic kernel", ok, f"1000 round trips ({roundtrip_bad} bad), sign {sign_bad} bad, "
                  f"floor {floor_bad} bad, 500 scaled weights ({scale_bad} bad); {elapsed:.1f} s")
    assert not (roundtrip_bad or sign_bad or floor_bad or scale_bad)
    assert elapsed < 10
