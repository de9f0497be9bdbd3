"""Monomial structure of the multiplier ideals of toric weights.

For ``phi = log max_i |z_i|^{a_i}`` the ideal ``I(t*phi)`` at the origin is
monomial, and ``z^alpha`` belongs to it exactly when
``sum_i (alpha_i + 1)/a_i > t``.  Everything here is an exact lattice-point
computation on top of that test.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Sequence

from . import caps
from .errors import BoxTooLarge, NonPositiveWeight, PreconditionError, VerificationError
from .numbers import SurdNumber, as_surd

Exponent = tuple[int, ...]

ONE = SurdNumber.rational(1)


@dataclass(frozen=True)
class WeightSpec:
    """Exponents ``a_1..a_m`` of a toric weight, ambient dimension ``n`` and the
    polydisc radius used for the trailing coordinates ``z_{m+1..n}``."""

    a: tuple[SurdNumber, ...]
    n: int | None = None
    trailing_radius: Fraction = Fraction(1, 2)

    def __post_init__(self) -> None:
        a = tuple(as_surd(x) for x in self.a)
        if not a:
            raise ValueError("a weight needs at least one exponent")
        for i, x in enumerate(a):
            if x.sign() <= 0:
                raise NonPositiveWeight(f"exponent a[{i}] = {x} is not positive")
        object.__setattr__(self, "a", a)
        n = len(a) if self.n is None else int(self.n)
        if n < len(a):
            raise ValueError(f"ambient dimension n={n} is smaller than m={len(a)}")
        object.__setattr__(self, "n", n)
        rho = Fraction(self.trailing_radius)
        if rho <= 0:
            raise ValueError("trailing radius must be positive")
        object.__setattr__(self, "trailing_radius", rho)

    @classmethod
    def of(cls, *a: SurdNumber | int | Fraction | str, n: int | None = None) -> WeightSpec:
        return cls(tuple(as_surd(x) for x in a), n)

    @property
    def m(self) -> int:
        return len(self.a)

    @cached_property
    def reciprocals(self) -> tuple[SurdNumber, ...]:
        return tuple(x.reciprocal() for x in self.a)

    @property
    def is_rational(self) -> bool:
        return all(x.is_rational for x in self.a)

    def scaled(self, t: SurdNumber) -> WeightSpec:
        return WeightSpec(tuple(t * x for x in self.a), self.n, self.trailing_radius)

    def __str__(self) -> str:
        return "(" + ", ".join(str(x) for x in self.a) + ")"


def _check_scale(t: SurdNumber | int | Fraction | str) -> SurdNumber:
    t = as_surd(t)
    if t.sign() <= 0:
        raise PreconditionError(f"scale t = {t} must be positive")
    return t


def exponent_sum(alpha: Sequence[int], w: WeightSpec) -> SurdNumber:
    """``sum_{i<=m} (alpha_i + 1)/a_i``; trailing entries of ``alpha`` are ignored."""
    if len(alpha) < w.m:
        raise ValueError(f"exponent {tuple(alpha)} has fewer than m={w.m} entries")
    if any(k < 0 for k in alpha):
        raise ValueError(f"exponent {tuple(alpha)} has a negative entry")
    total = SurdNumber()
    for k, r in zip(alpha, w.reciprocals):
        total = total + (k + 1) * r
    return total


def contains(alpha: Sequence[int], w: WeightSpec, t: SurdNumber | int | Fraction | str = 1) -> bool:
    t = _check_scale(t)
    return (exponent_sum(alpha, w) - t).sign() > 0


def lct(w: WeightSpec) -> SurdNumber:
    """Log canonical threshold ``sum 1/a_i``."""
    total = SurdNumber()
    for r in w.reciprocals:
        total = total + r
    return total


def _box(w: WeightSpec, t: SurdNumber) -> tuple[int, ...]:
    bounds = tuple((t * x).floor() for x in w.a)
    if all(b > 0 for b in bounds):
        size = math.prod(bounds)
        limit = caps.current().max_box
        if size > limit:
            raise BoxTooLarge(f"candidate box {bounds} has {size} points, cap is {limit}")
    return bounds


def enumerate_nonmembers(w: WeightSpec, t: SurdNumber | int | Fraction | str = 1) -> Iterator[tuple[Exponent, SurdNumber]]:
    """Yield ``(alpha, sum (alpha_i+1)/a_i)`` for every non-member at scale ``t``
    in lexicographic order.

    Candidates live in the box ``alpha_i <= floor(t*a_i) - 1``; a branch is cut
    as soon as its partial sum plus the cheapest completion exceeds ``t``.
    """
    t = _check_scale(t)
    bounds = _box(w, t)
    if any(b <= 0 for b in bounds):
        return
    recips = w.reciprocals
    tail = [SurdNumber()] * (w.m + 1)
    for i in range(w.m - 1, -1, -1):
        tail[i] = tail[i + 1] + recips[i]

    def walk(i: int, prefix: Exponent, partial: SurdNumber) -> Iterator[tuple[Exponent, SurdNumber]]:
        if i == w.m:
            yield prefix, partial
            return
        for k in range(bounds[i]):
            s = partial + (k + 1) * recips[i]
            if (s + tail[i + 1] - t).sign() > 0:
                break
            yield from walk(i + 1, prefix + (k,), s)

    yield from walk(0, (), SurdNumber())


def _minimal_members(nonmember_set: set[Exponent], m: int) -> tuple[Exponent, ...]:
    if not nonmember_set:
        return ((0,) * m,)
    found = set()
    for beta in nonmember_set:
        for i in range(m):
            cand = beta[:i] + (beta[i] + 1,) + beta[i + 1:]
            if cand in nonmember_set:
                continue
            if all(
                cand[j] == 0 or (cand[:j] + (cand[j] - 1,) + cand[j + 1:]) in nonmember_set
                for j in range(m)
            ):
                found.add(cand)
    return tuple(sorted(found))


@dataclass(frozen=True)
class Staircase:
    scale: SurdNumber
    nonmembers: tuple[Exponent, ...]
    generators: tuple[Exponent, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "scale": str(self.scale),
            "nonmembers": [list(a) for a in self.nonmembers],
            "generators": [list(g) for g in self.generators],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        """SHA-256 of the canonical non-member list (scale-independent)."""
        payload = json.dumps([list(a) for a in self.nonmembers], separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()

    def is_member(self, alpha: Sequence[int]) -> bool:
        return tuple(alpha) not in set(self.nonmembers)


def nonmembers(w: WeightSpec, t: SurdNumber | int | Fraction | str = 1) -> Staircase:
    t = _check_scale(t)
    found = tuple(alpha for alpha, _ in enumerate_nonmembers(w, t))
    return Staircase(t, found, _minimal_members(set(found), w.m))


def generators(w: WeightSpec, t: SurdNumber | int | Fraction | str = 1) -> tuple[Exponent, ...]:
    return nonmembers(w, t).generators


def ideal_equal(w: WeightSpec, t1: SurdNumber | int | Fraction | str, t2: SurdNumber | int | Fraction | str) -> bool:
    t1, t2 = _check_scale(t1), _check_scale(t2)
    if t1 == t2:
        return True
    return nonmembers(w, t1).nonmembers == nonmembers(w, t2).nonmembers


def jumping_numbers(w: WeightSpec, t: SurdNumber | int | Fraction | str = 1) -> list[SurdNumber]:
    """Distinct values of ``sum (alpha_i+1)/a_i`` that are ``<= t``, ascending."""
    return sorted({s for _, s in enumerate_nonmembers(w, t)})


def epsilon0(w: WeightSpec) -> SurdNumber | None:
    """Largest margin ``eps0`` with ``I((1-eps)phi) = I(phi)`` for all ``eps`` in ``(0, eps0]``.

    ``None`` when some sum hits 1 exactly; then the ideal jumps at ``t = 1``
    and no margin exists.  Returns 1 when the ideal is trivial.
    """
    sums = [s for _, s in enumerate_nonmembers(w, ONE)]
    if any(s == ONE for s in sums):
        return None
    if not sums:
        eps = ONE
        check = SurdNumber.rational(Fraction(1, 2))
    else:
        eps = ONE - max(sums)
        check = ONE - eps
    if not ideal_equal(w, ONE, check):
        raise VerificationError(f"margin {eps} failed to re-verify for {w}")
    return eps
