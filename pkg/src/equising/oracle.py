"""Closed-form and Monte Carlo evaluation of monomial masses on the sublevel
sets ``{phi < log(r)/2}`` of toric weights, plus the checks built on them:
a dyadic-shell integrability probe, the concavity of the minimal-integration
curve ``G(-log r)``, and the orthogonality (Bessel) inequality.

All masses factor over coordinates.  For ``i <= m`` the region is the disc
``|z_i| < r^{1/(2 a_i)}``; trailing coordinates range over the polydisc of
radius ``rho = w.trailing_radius``.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import mpmath
import numpy as np

from .errors import DegenerateRegion, NonIntegrableTerm, PreconditionMemberExponent
from .numbers import SurdNumber
from .staircase import WeightSpec, exponent_sum

DPS = 50
CHUNK = 1 << 16


class Region(str, enum.Enum):
    MAX = "Max"
    SUM = "Sum"


def _full_alpha(alpha: Sequence[int], w: WeightSpec) -> tuple[int, ...]:
    alpha = tuple(int(k) for k in alpha)
    if len(alpha) == w.m:
        alpha = alpha + (0,) * (w.n - w.m)
    if len(alpha) != w.n:
        raise ValueError(f"exponent {alpha} must have m={w.m} or n={w.n} entries")
    if any(k < 0 for k in alpha):
        raise ValueError(f"exponent {alpha} has a negative entry")
    return alpha


def _dec(x: mpmath.mpf) -> str:
    return mpmath.nstr(x, 17, min_fixed=-5, max_fixed=5)


@dataclass(frozen=True)
class ClosedFormMass:
    """``coefficient * pi**pi_power * r**exponent`` with exact parts."""

    coefficient: Fraction
    pi_power: int
    r: Fraction
    exponent: SurdNumber

    def value(self, dps: int = DPS) -> mpmath.mpf:
        with mpmath.workdps(dps + 10):
            s = self.exponent.to_mpf(dps + 10)
            v = (
                mpmath.mpf(self.coefficient.numerator) / self.coefficient.denominator
                * mpmath.pi ** self.pi_power
                * mpmath.power(mpmath.mpf(self.r.numerator) / self.r.denominator, s)
            )
        return +v

    @property
    def decimal(self) -> str:
        return _dec(self.value())

    def __str__(self) -> str:
        return f"{self.coefficient}*pi^{self.pi_power}*({self.r})^({self.exponent})"

    def to_dict(self) -> dict:
        return {
            "coefficient": str(self.coefficient),
            "pi_power": self.pi_power,
            "r": str(self.r),
            "exponent": str(self.exponent),
            "decimal": self.decimal,
        }


def trailing_factor(alpha: Sequence[int], w: WeightSpec) -> Fraction:
    """Rational part of ``int_{V} |z_{m+1}^..|^2``; the ``pi**(n-m)`` is separate."""
    rho = w.trailing_radius
    out = Fraction(1)
    for k in alpha[w.m:]:
        out *= rho ** (2 * (k + 1)) / (k + 1)
    return out


def closed_form_mass(alpha: Sequence[int], w: WeightSpec, r: Fraction | int | str) -> ClosedFormMass:
    alpha = _full_alpha(alpha, w)
    r = Fraction(r)
    if not 0 < r <= 1:
        raise ValueError(f"r = {r} must lie in (0, 1]")
    coef = Fraction(1, math.prod(k + 1 for k in alpha[: w.m])) * trailing_factor(alpha, w)
    return ClosedFormMass(coef, w.n, r, exponent_sum(alpha, w))


def weighted_closed_form(alpha: Sequence[int], w: WeightSpec, r: Fraction | int | str) -> mpmath.mpf:
    """``int |z^alpha|^2 e^{-2 phi}`` over ``{phi < log(r)/2}``: layer-cake over
    ``M(t) = C t^s`` gives ``C s r^{s-1}/(s-1)``, finite only for ``s > 1``."""
    r = Fraction(r)
    mass = closed_form_mass(alpha, w, r)
    if (mass.exponent - 1).sign() <= 0:
        raise NonIntegrableTerm(f"z^{tuple(alpha)} is not square integrable against e^(-2 phi)")
    with mpmath.workdps(DPS):
        s = mass.exponent.to_mpf(DPS)
        rr = mpmath.mpf(r.numerator) / r.denominator
        unit = ClosedFormMass(mass.coefficient, mass.pi_power, Fraction(1), mass.exponent).value()
        return unit * s / (s - 1) * mpmath.power(rr, s - 1)


# ---- Monte Carlo -----------------------------------------------------------


@dataclass(frozen=True)
class IntegralReport:
    closed_form: str
    exponent: str
    mc_estimate: float
    mc_stderr: float
    samples: int
    seed: int
    region: Region
    acceptance: float

    def to_dict(self) -> dict:
        return {
            "closed_form": self.closed_form,
            "exponent": self.exponent,
            "mc_estimate": format(self.mc_estimate, ".17g"),
            "mc_stderr": format(self.mc_stderr, ".17g"),
            "samples": self.samples,
            "seed": self.seed,
            "region": self.region.value,
            "acceptance": format(self.acceptance, ".17g"),
        }


def _radii(w: WeightSpec, r: Fraction) -> np.ndarray:
    with mpmath.workdps(30):
        rr = mpmath.mpf(r.numerator) / r.denominator
        lead = [float(mpmath.power(rr, 1 / (2 * x.to_mpf(30)))) for x in w.a]
    return np.array(lead + [float(w.trailing_radius)] * (w.n - w.m))


def _chunk_sizes(n: int) -> list[int]:
    sizes = [CHUNK] * (n // CHUNK)
    if n % CHUNK:
        sizes.append(n % CHUNK)
    return sizes


def _sample_chunk(args) -> tuple[float, float, int]:
    size, seq, radii, alpha, a, bound, region = args
    rng = np.random.default_rng(seq)
    # each coordinate uniform on the real square [-R, R]^2 around its disc
    xy = radii[None, :, None] * rng.uniform(-1.0, 1.0, (size, radii.size, 2))
    mod = np.hypot(xy[..., 0], xy[..., 1])
    inside = np.all(mod < radii, axis=1)
    if region is Region.SUM:
        inside &= np.sum(mod[:, : a.size] ** a, axis=1) < bound
    f = np.where(inside, np.prod(mod ** (2 * alpha), axis=1), 0.0)
    return float(f.sum()), float(np.square(f).sum()), int(inside.sum())


def mc_mass(
    alpha: Sequence[int],
    w: WeightSpec,
    r: Fraction | int | str,
    region: Region | str = Region.MAX,
    N: int = 100_000,
    seed: int = 0,
    workers: int = 1,
) -> IntegralReport:
    """Rejection sampling of ``int |z^alpha|^2`` over ``{max |z_i|^{a_i} < sqrt(r)}``
    or ``{sum |z_i|^{a_i} < sqrt(r)}``.

    Points are drawn from the real box enclosing the polydisc
    ``|z_i| < r^{1/(2 a_i)}`` (which is the max-form region) and rejected
    outside the region.  The budget is split into fixed-size chunks with
    spawned seed streams, reduced in chunk order, so results do not depend
    on ``workers``.
    """
    region = Region(region)
    if N < 1000:
        raise ValueError("N must be at least 1000")
    alpha = _full_alpha(alpha, w)
    r = Fraction(r)
    radii = _radii(w, r)
    volume = float(np.prod((2 * radii) ** 2))
    a = np.array([float(x) for x in w.a])
    bound = math.sqrt(r)
    sizes = _chunk_sizes(N)
    seqs = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = [(n, s, radii, np.array(alpha, dtype=float), a, bound, region) for n, s in zip(sizes, seqs)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(_sample_chunk, jobs))
    else:
        parts = [_sample_chunk(j) for j in jobs]
    total = sum(p[0] for p in parts)
    total_sq = sum(p[1] for p in parts)
    hits = sum(p[2] for p in parts)
    if hits / N < 1e-6:
        raise DegenerateRegion(f"acceptance rate {hits / N:g} below 1e-6")
    mean = total / N
    var = max(total_sq / N - mean * mean, 0.0)
    cf = closed_form_mass(alpha, w, r)
    return IntegralReport(
        closed_form=cf.decimal,
        exponent=str(cf.exponent),
        mc_estimate=volume * mean,
        mc_stderr=volume * math.sqrt(var / (N - 1)),
        samples=N,
        seed=seed,
        region=region,
        acceptance=hits / N,
    )


# ---- integrability probe ---------------------------------------------------


class ProbeVerdict(str, enum.Enum):
    CONVERGENT = "Convergent"
    DIVERGENT = "Divergent"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class ProbeResult:
    verdict: ProbeVerdict
    exponent: SurdNumber
    min_ratio: str
    max_ratio: str
    lower_partial_sum: str
    upper_partial_sum: str
    shells: int

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "exponent": str(self.exponent),
            "min_ratio": self.min_ratio,
            "max_ratio": self.max_ratio,
            "lower_partial_sum": self.lower_partial_sum,
            "upper_partial_sum": self.upper_partial_sum,
            "shells": self.shells,
        }


def integrability_probe(
    alpha: Sequence[int], w: WeightSpec, shells: int = 64, tol: float = 1e-12
) -> ProbeResult:
    """Classify local integrability of ``|z^alpha|^2 e^{-2 phi}`` near 0.

    On the shell ``2^{-j-1} <= e^{2 phi} < 2^{-j}`` the weight ``e^{-2 phi}``
    lies in ``(2^j, 2^{j+1}]``, so the integral is bracketed by the shell
    masses times those bounds.  Ratios of consecutive shell terms at most
    ``1 - tol`` certify geometric decay; ratios at least 1 mean the terms
    never shrink and the partial sums grow without bound.
    """
    cf = lambda r: closed_form_mass(alpha, w, r).value(DPS)  # noqa: E731
    with mpmath.workdps(DPS):
        masses = [cf(Fraction(1, 2**j)) for j in range(shells + 2)]
        lower = [(masses[j] - masses[j + 1]) * 2**j for j in range(shells + 1)]
        upper = [2 * t for t in lower]
        ratios = [lower[j + 1] / lower[j] for j in range(shells)]
        lo_r, hi_r = min(ratios), max(ratios)
        if hi_r <= 1 - tol:
            verdict = ProbeVerdict.CONVERGENT
        elif lo_r >= 1:
            verdict = ProbeVerdict.DIVERGENT
        else:
            verdict = ProbeVerdict.INCONCLUSIVE
        return ProbeResult(
            verdict,
            exponent_sum(_full_alpha(alpha, w), w),
            _dec(lo_r),
            _dec(hi_r),
            _dec(mpmath.fsum(lower)),
            _dec(mpmath.fsum(upper)),
            shells,
        )


# ---- G curve ----------------------------------------------------------------


DEFAULT_GRID = tuple(Fraction(k, 10) for k in range(1, 11))


@dataclass(frozen=True)
class GCurve:
    alpha: tuple[int, ...]
    rs: tuple[Fraction, ...]
    values: tuple[mpmath.mpf, ...]
    s: SurdNumber
    maximal_flag: bool
    g_at_one: mpmath.mpf

    def to_dict(self) -> dict:
        return {
            "alpha": list(self.alpha),
            "s": str(self.s),
            "maximal_flag": self.maximal_flag,
            "G0": _dec(self.g_at_one),
            "grid": [
                {"r": str(r), "G": _dec(v)} for r, v in zip(self.rs, self.values)
            ],
        }


@dataclass(frozen=True)
class GCurveCheck:
    curve: GCurve
    concave: bool
    lower_bound: bool
    nondecreasing: bool
    equality_on_grid: bool
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (
            self.concave
            and self.lower_bound
            and self.nondecreasing
            and (self.equality_on_grid or not self.curve.maximal_flag)
            and (self.curve.maximal_flag or not self.equality_on_grid or all(r == 1 for r in self.curve.rs))
        )

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "concave": self.concave,
            "lower_bound": self.lower_bound,
            "nondecreasing": self.nondecreasing,
            "equality_on_grid": self.equality_on_grid,
            "failures": self.failures,
            "curve": self.curve.to_dict(),
        }


def g_curve_check(
    alpha: Sequence[int],
    w: WeightSpec,
    grid: Sequence[Fraction] = DEFAULT_GRID,
    rtol: float = 1e-9,
) -> GCurveCheck:
    """Evaluate ``G(-log r)`` for the monomial ``z^alpha`` (a non-member, so
    the minimal integration is the monomial's own mass) and test midpoint
    concavity in ``r``, ``G(-log r) >= r G(0)``, and equality iff ``s = 1``."""
    alpha = _full_alpha(alpha, w)
    s = exponent_sum(alpha, w)
    if (s - 1).sign() > 0:
        raise PreconditionMemberExponent(
            f"z^{alpha} lies in the multiplier ideal (s = {s} > 1); its minimal integration is 0"
        )
    rs = tuple(sorted({Fraction(r) for r in grid}))
    if not rs or rs[0] <= 0 or rs[-1] > 1:
        raise ValueError("grid points must lie in (0, 1]")
    failures = []
    with mpmath.workdps(DPS):
        G = {r: closed_form_mass(alpha, w, r).value() for r in rs}
        g0 = closed_form_mass(alpha, w, 1).value()
        concave = True
        for i, r1 in enumerate(rs):
            for r2 in rs[i + 1:]:
                mid = closed_form_mass(alpha, w, (r1 + r2) / 2).value()
                chord = (G[r1] + G[r2]) / 2
                if mid < chord * (1 - rtol):
                    concave = False
                    failures.append(f"concavity fails at r=({r1}, {r2})")
        lower_bound = True
        equality = True
        for r in rs:
            line = mpmath.mpf(r.numerator) / r.denominator * g0
            if G[r] < line * (1 - rtol):
                lower_bound = False
                failures.append(f"G(-log {r}) < r*G(0)")
            if abs(G[r] - line) > rtol * line:
                equality = False
        nondecreasing = all(G[a] <= G[b] for a, b in zip(rs, rs[1:]))
        if not nondecreasing:
            failures.append("G not nondecreasing in r")
    curve = GCurve(alpha, rs, tuple(G[r] for r in rs), s, s == 1, g0)
    # r = 1 is an equality for every s, so only interior points can refute it
    discriminating = any(r < 1 for r in rs)
    if curve.maximal_flag and not equality or discriminating and equality and not curve.maximal_flag:
        failures.append("equality G = r*G(0) on grid does not match s = 1")
    return GCurveCheck(curve, concave, lower_bound, nondecreasing, equality, failures)


# ---- Bessel inequality -----------------------------------------------------


@dataclass(frozen=True)
class BesselReport:
    exact_total: str
    exact_terms: dict[tuple[int, ...], str]
    exact_pass: bool
    mc_total: float
    mc_stderr: float
    mc_margins: dict[tuple[int, ...], tuple[float, float]]
    mc_pass: bool
    samples: int
    seed: int

    @property
    def passed(self) -> bool:
        return self.exact_pass and self.mc_pass

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "exact_total": self.exact_total,
            "exact_terms": {str(list(k)): v for k, v in self.exact_terms.items()},
            "exact_pass": self.exact_pass,
            "mc_total": format(self.mc_total, ".17g"),
            "mc_stderr": format(self.mc_stderr, ".17g"),
            "mc_margins": {
                str(list(k)): [format(d, ".17g"), format(e, ".17g")] for k, (d, e) in self.mc_margins.items()
            },
            "mc_pass": self.mc_pass,
            "samples": self.samples,
            "seed": self.seed,
        }


def bessel_check(
    coeffs: Mapping[Sequence[int], complex | float | Fraction],
    w: WeightSpec,
    r: Fraction | int | str,
    N: int = 200_000,
    seed: int = 0,
) -> BesselReport:
    """Check ``int |f|^2 e^{-2phi} >= int |b_alpha z^alpha|^2 e^{-2phi}`` on
    ``{phi < log(r)/2}`` for each term of ``f = sum b_alpha z^alpha``.

    Exactly: monomials are orthogonal on Reinhardt regions, so the left side
    is the sum of the right sides.  Numerically: both sides are estimated on
    one shared sample and the difference must exceed ``-3`` standard errors.
    """
    r = Fraction(r)
    terms = {_full_alpha(k, w): complex(v) for k, v in coeffs.items() if complex(v) != 0}
    if not terms:
        raise ValueError("f has no nonzero coefficients")
    for alpha in terms:
        probe = integrability_probe(alpha, w)
        if probe.verdict is not ProbeVerdict.CONVERGENT:
            raise NonIntegrableTerm(
                f"|z^{alpha}|^2 e^(-2 phi) is not integrable near 0 (probe: {probe.verdict.value})"
            )
    with mpmath.workdps(DPS):
        parts = {
            alpha: abs(b) ** 2 * weighted_closed_form(alpha, w, r) for alpha, b in terms.items()
        }
        total = mpmath.fsum(parts.values())
        exact_pass = all(total >= v for v in parts.values())

    rng = np.random.default_rng(seed)
    radii = _radii(w, r)
    volume = float(np.prod(np.pi * radii**2))
    mod = radii * np.sqrt(rng.random((N, w.n)))
    z = mod * np.exp(2j * np.pi * rng.random((N, w.n)))
    a = np.array([float(x) for x in w.a])
    weight = 1.0 / np.max(mod[:, : w.m] ** (2 * a), axis=1)
    monos = {alpha: b * np.prod(z ** np.array(alpha), axis=1) for alpha, b in terms.items()}
    f = sum(monos.values())
    full = np.abs(f) ** 2 * weight
    margins = {}
    for alpha, mono in monos.items():
        diff = full - np.abs(mono) ** 2 * weight
        margins[alpha] = (
            float(volume * diff.mean()),
            float(volume * diff.std(ddof=1) / math.sqrt(N)),
        )
    mc_pass = all(d >= -3 * e for d, e in margins.values())
    return BesselReport(
        exact_total=_dec(total),
        exact_terms={k: _dec(v) for k, v in parts.items()},
        exact_pass=exact_pass,
        mc_total=float(volume * full.mean()),
        mc_stderr=float(volume * full.std(ddof=1) / math.sqrt(N)),
        mc_margins=margins,
        mc_pass=mc_pass,
        samples=N,
        seed=seed,
    )
