"""Exact slopes: rationals and quadratic irrationals with integer floor/ceil.

Rational values are plain :class:`fractions.Fraction`.  Irrational values are
:class:`QuadIrrational`, representing ``p + q*sqrt(d)`` with rational ``p``,
``q`` and squarefree ``d > 1``.  Floors are computed with integer square roots,
so no floating point enters any comparison.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Union


class SlopeError(ValueError):
    pass


def _squarefree(d: int) -> bool:
    if d < 2:
        return False
    f = 2
    while f * f <= d:
        if d % (f * f) == 0:
            return False
        f += 1
    return True


def _floor_sqrt_times(b: int, d: int) -> int:
    """floor(b * sqrt(d)) for integer b, non-square d."""
    r = isqrt(b * b * d)
    return r if b >= 0 else -r - 1


@dataclass(frozen=True)
class QuadIrrational:
    """The number ``p + q*sqrt(d)``; ``q`` is never zero."""

    p: Fraction
    q: Fraction
    d: int

    def __post_init__(self):
        object.__setattr__(self, "p", Fraction(self.p))
        object.__setattr__(self, "q", Fraction(self.q))
        if self.q == 0:
            raise SlopeError("quadratic irrational needs a nonzero sqrt coefficient")
        if not _squarefree(self.d):
            raise SlopeError(f"d={self.d} is not a squarefree integer > 1")

    @classmethod
    def from_abc(cls, a: int, b: int, d: int, c: int) -> "QuadIrrational":
        """The value ``(a + b*sqrt(d)) / c``."""
        return cls(Fraction(a, c), Fraction(b, c), d)

    # arithmetic closed over the same d, plus rationals
    def __add__(self, other):
        if isinstance(other, QuadIrrational):
            if other.d != self.d:
                raise SlopeError("cannot add quadratic irrationals with different radicands")
            q = self.q + other.q
            if q == 0:
                return self.p + other.p
            return QuadIrrational(self.p + other.p, q, self.d)
        if isinstance(other, (int, Fraction)):
            return QuadIrrational(self.p + other, self.q, self.d)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return QuadIrrational(-self.p, -self.q, self.d)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return Fraction(0)
            return QuadIrrational(self.p * other, self.q * other, self.d)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return NotImplemented

    def sign(self) -> int:
        p, q = self.p, self.q
        if p >= 0 and q > 0:
            return 1
        if p <= 0 and q < 0:
            return -1
        # opposite signs: compare p^2 with q^2 d
        diff = p * p - q * q * self.d
        return (1 if p > 0 else -1) * (1 if diff > 0 else -1)

    def __float__(self):
        return float(self.p) + float(self.q) * self.d ** 0.5

    def floor(self) -> int:
        c = self.p.denominator * self.q.denominator
        a = int(self.p * c)
        b = int(self.q * c)
        return (a + _floor_sqrt_times(b, self.d)) // c

    def ceil(self) -> int:
        return self.floor() + 1

    def __str__(self):
        return format_slope(self)


Slope = Union[Fraction, QuadIrrational]


def as_exact(x) -> Slope:
    if isinstance(x, QuadIrrational):
        return x
    if isinstance(x, str):
        return parse_slope(x)
    if isinstance(x, float):
        raise SlopeError("floats are not exact; pass a Fraction or a string")
    return Fraction(x)


def sign(x: Slope) -> int:
    if isinstance(x, QuadIrrational):
        return x.sign()
    return (x > 0) - (x < 0)


def compare(x: Slope, y: Slope) -> int:
    return sign(as_exact(x) - as_exact(y))


def floor_exact(x: Slope) -> int:
    if isinstance(x, QuadIrrational):
        return x.floor()
    return Fraction(x).__floor__()


def ceil_exact(x: Slope) -> int:
    if isinstance(x, QuadIrrational):
        return x.ceil()
    return Fraction(x).__ceil__()


def is_rational(x: Slope) -> bool:
    return not isinstance(x, QuadIrrational)


def in_unit_interval(x: Slope) -> bool:
    return sign(x) >= 0 and compare(x, 1) <= 0


def to_float(x: Slope) -> float:
    return float(x)


_QUAD_RE = re.compile(
    r"^\(\s*([+-]?\d+)\s*([+-])\s*(\d+)\s*\*\s*sqrt\(\s*(\d+)\s*\)\s*\)\s*/\s*(\d+)$"
)


def parse_slope(text: str) -> Slope:
    """Parse ``"p/q"``, an integer, or ``"(a+b*sqrt(d))/c"``."""
    s = text.strip()
    m = _QUAD_RE.match(s)
    if m:
        a, op, b, d, c = m.groups()
        b = int(b) if op == "+" else -int(b)
        return QuadIrrational.from_abc(int(a), b, int(d), int(c))
    try:
        return Fraction(s)
    except ValueError:
        raise SlopeError(f"cannot parse slope {text!r}") from None


def format_slope(x: Slope) -> str:
    if isinstance(x, QuadIrrational):
        c = x.p.denominator * x.q.denominator // _gcd(x.p.denominator, x.q.denominator)
        a = int(x.p * c)
        b = int(x.q * c)
        op = "+" if b >= 0 else "-"
        return f"({a}{op}{abs(b)}*sqrt({x.d}))/{c}"
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def irrational_between(lo: Fraction, hi: Fraction) -> QuadIrrational:
    """A quadratic irrational strictly inside ``(lo, hi)``; ``lo < hi``."""
    lo, hi = Fraction(lo), Fraction(hi)
    if lo >= hi:
        raise SlopeError("empty interval")
    # lo + (hi - lo) * sqrt(2)/2 lies strictly between, since 0 < sqrt(2)/2 < 1
    return QuadIrrational(lo, (hi - lo) / 2, 2)


GOLDEN_CONJUGATE = QuadIrrational.from_abc(-1, 1, 5, 2)
