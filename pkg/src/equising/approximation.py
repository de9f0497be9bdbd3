"""Rational approximating sequences ``a^(k) -> a`` from below whose weights
``log max |z_i|^{a^(k)_i}`` decrease to the target weight while keeping its
multiplier ideal.

Every term lies in the window ``((1-eps)*a_i, a_i]``; for ``eps`` at most
the margin from :func:`equising.staircase.epsilon0` this forces equal
non-member sets, which each term also carries as an explicit certificate.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import mpmath
import numpy as np

from . import caps
from .decision import Outcome, decide
from .errors import (
    CertificateMismatch,
    DenominatorCap,
    EpsilonTooLarge,
    MonotonicityViolation,
    NotApproximableInput,
)
from .numbers import SurdNumber, as_surd
from .staircase import WeightSpec, epsilon0, nonmembers


class Mode(str, enum.Enum):
    CONSTANT = "Constant"
    STRICT = "Strict"


def continued_fraction(x: SurdNumber) -> Iterator[int]:
    """Partial quotients of ``x``, computed exactly on complete quotients."""
    while True:
        a = x.floor()
        yield a
        rest = x - a
        if rest.is_zero:
            return
        x = rest.reciprocal()


def simplest_between(lo: SurdNumber, hi: SurdNumber) -> Fraction:
    """The rational of least denominator in the open interval ``(lo, hi)``.

    Both endpoints are expanded as continued fractions in lockstep; the
    expansion stops at the first partial quotient where they part, which
    is where the Stern-Brocot paths to ``lo`` and ``hi`` diverge.
    """
    lo, hi = as_surd(lo), as_surd(hi)
    if lo.sign() < 0 or (hi - lo).sign() <= 0:
        raise ValueError(f"need 0 <= lo < hi, got ({lo}, {hi})")
    limit = caps.current().max_denominator
    quotients: list[int] = []
    while True:
        n = lo.floor()
        if (hi - (n + 1)).sign() > 0:
            quotients.append(n + 1)
            break
        if (lo - n).is_zero:
            # (n, hi) with hi <= n + 1: the answer is n + 1/z, z minimal
            quotients += [n, ((hi - n).reciprocal()).floor() + 1]
            break
        quotients.append(n)
        lo, hi = (hi - n).reciprocal(), (lo - n).reciprocal()
        if len(quotients) > 2 and _convergent(quotients).denominator > limit:
            break
    q = _convergent(quotients)
    if q.denominator > limit:
        raise DenominatorCap(f"the simplest rational in the interval needs a denominator > {limit}")
    return q


def _convergent(quotients: Sequence[int]) -> Fraction:
    p, q, p_prev, q_prev = 1, 0, 0, 1
    for a in quotients:
        p, q, p_prev, q_prev = a * p + p_prev, a * q + q_prev, p, q
    return Fraction(p, q)


@dataclass(frozen=True)
class TermCertificate:
    term_nonmembers: tuple[tuple[int, ...], ...]
    target_nonmembers: tuple[tuple[int, ...], ...]
    digest: str

    @property
    def passed(self) -> bool:
        return self.term_nonmembers == self.target_nonmembers


@dataclass(frozen=True)
class ApproxSequence:
    epsilon: SurdNumber
    terms: tuple[tuple[Fraction, ...], ...]
    certificates: tuple[TermCertificate, ...]
    mode: Mode

    def to_dict(self) -> dict:
        return {
            "epsilon": str(self.epsilon),
            "mode": self.mode.value,
            "terms": [[_frac(q) for q in term] for term in self.terms],
            "certificates": [c.digest for c in self.certificates],
        }

    @classmethod
    def from_dict(cls, data: dict) -> ApproxSequence:
        """Rebuild a sequence from its JSON form.  Certificates are recomputed
        lazily by :func:`verify_sequence`; digests are kept as given."""
        terms = tuple(tuple(Fraction(q) for q in term) for term in data["terms"])
        digests = list(data.get("certificates", [])) + [""] * len(terms)
        certs = tuple(TermCertificate((), (), d) for d in digests[: len(terms)])
        return cls(as_surd(data["epsilon"]), terms, certs, Mode(data["mode"]))


def _frac(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def _certify(term: Sequence[Fraction], w: WeightSpec, target) -> TermCertificate:
    stair = nonmembers(WeightSpec(tuple(SurdNumber.rational(q) for q in term), w.n, w.trailing_radius), 1)
    return TermCertificate(stair.nonmembers, target.nonmembers, stair.digest())


def build_sequence(w: WeightSpec, K: int, epsilon: SurdNumber | Fraction | str | None = None) -> ApproxSequence:
    if K < 1:
        raise ValueError("K must be positive")
    if decide(w).outcome is Outcome.NOT_APPROXIMABLE:
        raise NotApproximableInput(f"weight {w} has no decreasing equisingular approximation")
    eps = None if epsilon is None else as_surd(epsilon)
    if eps is not None and not (eps.sign() > 0 and (eps - 1).sign() < 0):
        raise ValueError(f"epsilon {eps} must lie in (0, 1)")
    target = nonmembers(w, 1)

    if w.is_rational:
        eps = eps if eps is not None else SurdNumber.rational(Fraction(1, 2))
        term = tuple(x.rational_part for x in w.a)
        cert = _certify(term, w, target)
        return ApproxSequence(eps, (term,) * K, (cert,) * K, Mode.CONSTANT)

    eps0 = epsilon0(w)
    if eps0 is None:  # pragma: no cover - excluded by decide() above
        raise NotApproximableInput(f"weight {w} has no equisingularity margin")
    if eps is None:
        eps = eps0 / 2
    elif (eps - eps0).sign() > 0:
        raise EpsilonTooLarge(f"epsilon {eps} exceeds the margin {eps0}")

    # term k sits in the band (a - d_k, a - d_{k+1}), d_k = 2^-k eps a, so the
    # window, strict increase and rate bound hold by construction
    terms: list[tuple[Fraction, ...]] = []
    for k in range(1, K + 1):
        term = []
        for x in w.a:
            if x.is_rational:
                term.append(x.rational_part)
                continue
            d_k = eps * x / 2**k
            term.append(simplest_between(x - d_k, x - d_k / 2))
        terms.append(tuple(term))
    certs = tuple(_certify(t, w, target) for t in terms)
    return ApproxSequence(eps, tuple(terms), certs, Mode.STRICT)


@dataclass
class SequenceReport:
    certificates_ok: bool
    window_ok: bool
    samples: int
    seed: int
    mismatched_terms: list[int]
    window_violations: list[tuple[int, int]]
    violations: list[dict]

    @property
    def passed(self) -> bool:
        return self.certificates_ok and self.window_ok and not self.violations

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "certificates_ok": self.certificates_ok,
            "window_ok": self.window_ok,
            "mismatched_terms": self.mismatched_terms,
            "window_violations": [list(v) for v in self.window_violations],
            "samples": self.samples,
            "seed": self.seed,
            "violations": self.violations,
        }


def _max_form(exps: Sequence[mpmath.mpf], logs: Sequence[mpmath.mpf]) -> mpmath.mpf:
    return max(e * lg for e, lg in zip(exps, logs))


def verify_sequence(
    seq: ApproxSequence,
    w: WeightSpec,
    samples: int = 100,
    seed: int = 0,
    raise_on_failure: bool = True,
    dps: int = 40,
) -> SequenceReport:
    """Re-check certificates and window containment exactly, then sample the
    punctured unit polydisc for the chain
    ``phi <= phi_{k+1} <= phi_k <= (1-eps) phi`` (max form)."""
    target = nonmembers(w, 1)
    mismatched = []
    window_bad = []
    for k, term in enumerate(seq.terms):
        if len(term) != w.m or _certify(term, w, target).passed is False:
            mismatched.append(k)
        for i, (q, x) in enumerate(zip(term, w.a)):
            low = (1 - seq.epsilon) * x
            if not ((low - q).sign() < 0 and (q - x).sign() <= 0):
                window_bad.append((k, i))
    rng = np.random.default_rng(seed)
    moduli = rng.uniform(0.0, 1.0, size=(samples, w.m))
    moduli[moduli == 0.0] = np.finfo(float).tiny
    violations = []
    with mpmath.workdps(dps):
        a = [x.to_mpf(dps) for x in w.a]
        scale = 1 - seq.epsilon.to_mpf(dps)
        chains = [[mpmath.mpf(q.numerator) / q.denominator for q in term] for term in seq.terms]
        for idx, row in enumerate(moduli):
            logs = [mpmath.log(mpmath.mpf(float(v))) for v in row]
            phi = _max_form(a, logs)
            values = [phi] + [_max_form(c, logs) for c in reversed(chains)] + [scale * phi]
            labels = ["phi"] + [f"phi_{k}" for k in range(len(chains), 0, -1)] + ["(1-eps)phi"]
            for j in range(len(values) - 1):
                if values[j] > values[j + 1]:
                    violations.append(
                        {
                            "sample": idx,
                            "point_moduli": [float(v) for v in row],
                            "lhs": labels[j],
                            "rhs": labels[j + 1],
                            "lhs_value": float(values[j]),
                            "rhs_value": float(values[j + 1]),
                        }
                    )
                    break
    report = SequenceReport(
        certificates_ok=not mismatched,
        window_ok=not window_bad,
        samples=samples,
        seed=seed,
        mismatched_terms=mismatched,
        window_violations=window_bad,
        violations=violations,
    )
    if raise_on_failure:
        if mismatched:
            raise CertificateMismatch(f"terms {mismatched} change the multiplier ideal", report)
        if window_bad or violations:
            raise MonotonicityViolation(
                f"{len(window_bad)} window violations, {len(violations)} sampled chain violations",
                report,
            )
    return report
