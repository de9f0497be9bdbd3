"""Exact arithmetic in multiquadratic fields Q(sqrt(d1), ..., sqrt(dk)).

A :class:`SurdNumber` is a finite sum ``sum q_d * sqrt(d)`` with rational
coefficients and distinct squarefree radicands.  Square roots of distinct
squarefree integers are linearly independent over Q, so the canonical term
set is unique and equality is structural.  Signs and floors of irrational
values are decided by refining rational enclosures of each square root.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, total_ordering
from typing import Iterable, Mapping, Union

import mpmath

from . import caps
from .errors import FieldTooLarge, ParseError, PrecisionCap

Rational = Union[int, Fraction]

_START_BITS = 64


@lru_cache(maxsize=4096)
def prime_factors(n: int) -> tuple[int, ...]:
    """Distinct prime factors of ``n >= 1`` in increasing order."""
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out.append(n)
    return tuple(out)


@lru_cache(maxsize=4096)
def split_square(n: int) -> tuple[int, int]:
    """Write ``n = s**2 * f`` with ``f`` squarefree; return ``(s, f)``."""
    if n < 1:
        raise ValueError(f"radicand must be a positive integer, got {n}")
    s, f = 1, 1
    m = n
    p = 2
    while p * p <= m:
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        s *= p ** (e // 2)
        if e % 2:
            f *= p
        p += 1 if p == 2 else 2
    return s, f * m


@dataclass(frozen=True)
class RationalInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError("empty interval")

    def __add__(self, other: RationalInterval) -> RationalInterval:
        return RationalInterval(self.lo + other.lo, self.hi + other.hi)

    def scale(self, q: Fraction) -> RationalInterval:
        if q >= 0:
            return RationalInterval(q * self.lo, q * self.hi)
        return RationalInterval(q * self.hi, q * self.lo)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __contains__(self, x: Rational) -> bool:
        return self.lo <= x <= self.hi


def sqrt_enclosure(d: int, bits: int) -> RationalInterval:
    if d == 1:
        return RationalInterval(Fraction(1), Fraction(1))
    k = math.isqrt(d << (2 * bits))
    scale = 1 << bits
    if k * k == d << (2 * bits):
        return RationalInterval(Fraction(k, scale), Fraction(k, scale))
    return RationalInterval(Fraction(k, scale), Fraction(k + 1, scale))


def _coerce(x: object) -> SurdNumber:
    if isinstance(x, SurdNumber):
        return x
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return SurdNumber.rational(x)
    raise TypeError(f"cannot interpret {type(x).__name__} as a SurdNumber")


@total_ordering
class SurdNumber:
    """Exact element ``sum q_d * sqrt(d)`` of a multiquadratic field.

    >>> x = SurdNumber({1: 1, 2: 1})
    >>> str(x * x)
    '3+2*sqrt(2)'
    """

    __slots__ = ("_terms", "_hash")

    def __init__(
        self,
        terms: Mapping[int, Rational] | Iterable[tuple[int, Rational]] = (),
    ) -> None:
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[int, Fraction] = {}
        for d, q in items:
            if not isinstance(d, int) or isinstance(d, bool):
                raise TypeError("radicands must be integers")
            if d < 0:
                raise ValueError("negative radicand")
            if d == 0:
                continue
            s, f = split_square(d)
            acc[f] = acc.get(f, Fraction(0)) + Fraction(q) * s
        self._terms: tuple[tuple[int, Fraction], ...] = tuple(
            (d, q) for d, q in sorted(acc.items()) if q != 0
        )
        self._hash: int | None = None

    @classmethod
    def _from_canonical(cls, terms: tuple[tuple[int, Fraction], ...]) -> SurdNumber:
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def rational(cls, q: Rational) -> SurdNumber:
        q = Fraction(q)
        return cls._from_canonical(((1, q),) if q else ())

    @classmethod
    def sqrt(cls, n: int) -> SurdNumber:
        return cls({n: 1})

    @classmethod
    def parse(cls, text: str) -> SurdNumber:
        return parse_surd(text)

    # ---- structure -------------------------------------------------

    @property
    def terms(self) -> tuple[tuple[int, Fraction], ...]:
        return self._terms

    def coefficient(self, d: int) -> Fraction:
        for rad, q in self._terms:
            if rad == d:
                return q
        return Fraction(0)

    @property
    def radicands(self) -> tuple[int, ...]:
        return tuple(d for d, _ in self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_rational(self) -> bool:
        return all(d == 1 for d, _ in self._terms)

    @property
    def rational_part(self) -> Fraction:
        return self.coefficient(1)

    def as_fraction(self) -> Fraction:
        if not self.is_rational:
            raise ValueError(f"{self} is irrational")
        return self.rational_part

    def prime_support(self) -> tuple[int, ...]:
        primes: set[int] = set()
        for d, _ in self._terms:
            primes.update(prime_factors(d))
        return tuple(sorted(primes))

    def conjugate(self, p: int) -> SurdNumber:
        """Image under the automorphism sending sqrt(p) to -sqrt(p)."""
        return SurdNumber._from_canonical(
            tuple((d, -q if d % p == 0 else q) for d, q in self._terms)
        )

    # ---- arithmetic ------------------------------------------------

    def __add__(self, other: object) -> SurdNumber:
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        acc = dict(self._terms)
        for d, q in other._terms:
            acc[d] = acc.get(d, Fraction(0)) + q
        return SurdNumber._from_canonical(
            tuple((d, q) for d, q in sorted(acc.items()) if q != 0)
        )

    __radd__ = __add__

    def __neg__(self) -> SurdNumber:
        return SurdNumber._from_canonical(tuple((d, -q) for d, q in self._terms))

    def __sub__(self, other: object) -> SurdNumber:
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: object) -> SurdNumber:
        return _coerce(other) - self

    def __mul__(self, other: object) -> SurdNumber:
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        acc: dict[int, Fraction] = {}
        for d1, q1 in self._terms:
            for d2, q2 in other._terms:
                g = math.gcd(d1, d2)
                d = (d1 // g) * (d2 // g)
                acc[d] = acc.get(d, Fraction(0)) + q1 * q2 * g
        return SurdNumber._from_canonical(
            tuple((d, q) for d, q in sorted(acc.items()) if q != 0)
        )

    __rmul__ = __mul__

    def reciprocal(self) -> SurdNumber:
        """Multiplicative inverse via the product of all nontrivial conjugates.

        Eliminating one prime radical at a time (``z <- z * conj_p(z)``)
        accumulates exactly that product; the final ``z`` is the rational norm.
        """
        if self.is_zero:
            raise ZeroDivisionError("reciprocal of zero")
        primes = self.prime_support()
        limit = caps.current().max_primes
        if len(primes) > limit:
            raise FieldTooLarge(
                f"{self} has prime support {primes}, more than {limit} primes"
            )
        acc = SurdNumber.rational(1)
        z = self
        for p in primes:
            c = z.conjugate(p)
            acc = acc * c
            z = z * c
        return acc * SurdNumber.rational(1 / z.as_fraction())

    def __truediv__(self, other: object) -> SurdNumber:
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        if other.is_rational:
            if other.is_zero:
                raise ZeroDivisionError("division by zero")
            inv = 1 / other.rational_part
            return SurdNumber._from_canonical(tuple((d, q * inv) for d, q in self._terms))
        return self * other.reciprocal()

    def __rtruediv__(self, other: object) -> SurdNumber:
        return _coerce(other) / self

    def __pow__(self, k: int) -> SurdNumber:
        if not isinstance(k, int):
            return NotImplemented
        base = self if k >= 0 else self.reciprocal()
        out = SurdNumber.rational(1)
        for _ in range(abs(k)):
            out = out * base
        return out

    # ---- order -----------------------------------------------------

    def enclosure(self, bits: int) -> RationalInterval:
        """Rational interval of width ~ sum|q_d| * 2**-bits containing the value."""
        total = RationalInterval(Fraction(0), Fraction(0))
        for d, q in self._terms:
            total = total + sqrt_enclosure(d, bits).scale(q)
        return total

    def _refine(self, done) -> RationalInterval:
        bits = _START_BITS
        limit = caps.current().max_bits
        while True:
            box = self.enclosure(min(bits, limit))
            if done(box):
                return box
            if bits >= limit:
                raise PrecisionCap(f"could not resolve {self} within {limit} bits")
            bits *= 2

    def sign(self) -> int:
        if self.is_zero:
            return 0
        if self.is_rational:
            return 1 if self.rational_part > 0 else -1
        box = self._refine(lambda b: b.lo > 0 or b.hi < 0)
        return 1 if box.lo > 0 else -1

    def floor(self) -> int:
        if self.is_rational:
            return math.floor(self.rational_part)
        # irrational values are never integers, so a closed box inside [k, k+1] suffices
        box = self._refine(lambda b: b.hi <= math.floor(b.lo) + 1)
        return math.floor(box.lo)

    def __eq__(self, other: object) -> bool:
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            if self.is_rational:
                self._hash = hash(self.rational_part)
            else:
                self._hash = hash(self._terms)
        return self._hash

    def __lt__(self, other: object) -> bool:
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        return (self - other).sign() < 0

    def __bool__(self) -> bool:
        return not self.is_zero

    # ---- conversion ------------------------------------------------

    def to_mpf(self, dps: int = 30) -> mpmath.mpf:
        with mpmath.workdps(dps + 10):
            total = mpmath.mpf(0)
            for d, q in self._terms:
                total += mpmath.mpf(q.numerator) / q.denominator * mpmath.sqrt(d)
        return +total

    def __float__(self) -> float:
        return float(self.to_mpf(20))

    def __str__(self) -> str:
        return format_surd(self)

    def __repr__(self) -> str:
        return f"SurdNumber({format_surd(self)!r})"


# ---- spec-level functional API -----------------------------------------


def add(x: SurdNumber, y: SurdNumber) -> SurdNumber:
    return _coerce(x) + y


def mul(x: SurdNumber, y: SurdNumber) -> SurdNumber:
    return _coerce(x) * y


def reciprocal(x: SurdNumber) -> SurdNumber:
    return _coerce(x).reciprocal()


def sign(x: SurdNumber) -> int:
    return _coerce(x).sign()


def floor_of(x: SurdNumber) -> int:
    return _coerce(x).floor()


# ---- text syntax --------------------------------------------------------


def _format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_surd(x: SurdNumber) -> str:
    """Canonical text: sorted radicands, lowest-term rationals, ``+``/``-`` joins."""
    if x.is_zero:
        return "0"
    parts = []
    for i, (d, q) in enumerate(x.terms):
        neg = q < 0
        mag = -q if neg else q
        if d == 1:
            body = _format_rational(mag)
        elif mag == 1:
            body = f"sqrt({d})"
        else:
            body = f"{_format_rational(mag)}*sqrt({d})"
        if i == 0:
            parts.append(f"-{body}" if neg else body)
        else:
            parts.append(f"{'-' if neg else '+'}{body}")
    return "".join(parts)


_TOKEN = re.compile(
    r"\s*(?:(?P<sqrt>sqrt\s*\(\s*(?P<rad>\d+)\s*\))"
    r"|(?P<rat>(?P<num>\d+)(?:\s*/\s*(?P<den>\d+))?)"
    r"|(?P<op>[-+*])"
    r"|(?P<bad>\S))"
)


def parse_surd(text: str) -> SurdNumber:
    """Parse ``term (('+'|'-') term)*`` into a canonical :class:`SurdNumber`.

    A term is ``rational``, ``rational*sqrt(n)`` or ``sqrt(n)``; a leading
    sign is allowed.
    """
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise ParseError("unexpected character", text, pos)
        if m.group("bad") is not None:
            raise ParseError(f"unexpected {m.group('bad')!r}", text, m.start("bad"))
        kind = next(k for k in ("sqrt", "rat", "op") if m.group(k) is not None)
        tokens.append((kind, m, m.start(kind)))
        pos = m.end()
    if not tokens:
        raise ParseError("empty expression", text, 0)

    acc: dict[int, Fraction] = {}
    i = 0
    expect_sign = True
    while i < len(tokens):
        sgn = 1
        kind, m, at = tokens[i]
        if kind == "op":
            if m.group("op") == "*" or not expect_sign:
                raise ParseError(f"unexpected {m.group('op')!r}", text, at)
            sgn = -1 if m.group("op") == "-" else 1
            i += 1
            if i == len(tokens):
                raise ParseError("dangling sign", text, at)
            kind, m, at = tokens[i]
        coef = Fraction(1)
        rad = 1
        if kind == "rat":
            den = int(m.group("den")) if m.group("den") else 1
            if den == 0:
                raise ParseError("zero denominator", text, at)
            coef = Fraction(int(m.group("num")), den)
            i += 1
            if i < len(tokens) and tokens[i][0] == "op" and tokens[i][1].group("op") == "*":
                i += 1
                if i == len(tokens) or tokens[i][0] != "sqrt":
                    where = tokens[i][2] if i < len(tokens) else len(text)
                    raise ParseError("expected sqrt(...) after '*'", text, where)
                rad = int(tokens[i][1].group("rad"))
                i += 1
        elif kind == "sqrt":
            rad = int(m.group("rad"))
            i += 1
        else:
            raise ParseError(f"unexpected {m.group('op')!r}", text, at)
        if rad == 0:
            coef = Fraction(0)
            rad = 1
        s, f = split_square(rad)
        acc[f] = acc.get(f, Fraction(0)) + sgn * coef * s
        if i < len(tokens):
            kind, m, at = tokens[i]
            if kind != "op" or m.group("op") == "*":
                raise ParseError("expected '+' or '-'", text, at)
        expect_sign = True
    return SurdNumber(acc)


def as_surd(x: SurdNumber | Rational | str) -> SurdNumber:
    if isinstance(x, str):
        return parse_surd(x)
    return _coerce(x)
