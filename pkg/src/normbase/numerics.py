"""Exact rational and adic-digit arithmetic.

Bases are plain integers >= 2.  All real-number state is exact rational
(`fractions.Fraction`); digit strings are immutable tuples.  The scaled index
<b;r> = ceil(b / log r) is evaluated with certified interval arithmetic so
that a wrong ceiling can never leak into downstream window bookkeeping.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

from .enclosure import certified_ceil

__all__ = [
    "Base",
    "DigitBlock",
    "AdicRational",
    "Interval",
    "UnitSequence",
    "check_base",
    "minimal_representative",
    "is_minimal_representative",
    "mult_dependent",
    "scaled_index",
    "adic_value",
    "digits_of_fraction",
    "fractional_orbit",
    "minimal_representatives",
    "repeating_enumeration_m",
    "repeating_enumeration_list",
]

Base = int
UnitSequence = Sequence[Fraction]


def check_base(b: int) -> int:
    if not isinstance(b, int) or b < 2:
        raise ValueError("base must be an integer >= 2, got %r" % (b,))
    return b


@dataclass(frozen=True)
class DigitBlock:
    """A finite digit string over the alphabet {0, ..., base-1}.

    ``base`` is the alphabet size; it may be a base power (e.g. 9 for base-3
    digits read two at a time).  Empty blocks are allowed.
    """

    base: int
    digits: tuple[int, ...]

    def __post_init__(self):
        check_base(self.base)
        object.__setattr__(self, "digits", tuple(int(d) for d in self.digits))
        for d in self.digits:
            if not 0 <= d < self.base:
                raise ValueError("digit %d out of range for base %d" % (d, self.base))

    def __len__(self) -> int:
        return len(self.digits)

    def __iter__(self):
        return iter(self.digits)


@dataclass(frozen=True)
class AdicRational:
    """An exact rational in [0,1) given by digits in base ``base**power``."""

    base: int
    power: int
    digits: tuple[int, ...]

    def __post_init__(self):
        check_base(self.base)
        if self.power < 1:
            raise ValueError("power must be >= 1")
        alphabet = self.base ** self.power
        object.__setattr__(self, "digits", tuple(int(d) for d in self.digits))
        for d in self.digits:
            if not 0 <= d < alphabet:
                raise ValueError("digit %d out of range for base %d" % (d, alphabet))

    @property
    def precision(self) -> int:
        return len(self.digits)

    @property
    def value(self) -> Fraction:
        b = self.base ** self.power
        num = 0
        for d in self.digits:
            num = num * b + d
        return Fraction(num, b ** len(self.digits)) if self.digits else Fraction(0)

    def block(self) -> DigitBlock:
        return DigitBlock(self.base ** self.power, self.digits)


@dataclass(frozen=True)
class Interval:
    """Half-open subinterval [lower, upper) of the unit interval."""

    lower: Fraction
    upper: Fraction

    def __post_init__(self):
        lo, hi = Fraction(self.lower), Fraction(self.upper)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        if not (0 <= lo < hi <= 1):
            raise ValueError("need 0 <= lower < upper <= 1, got [%s, %s)" % (lo, hi))

    @property
    def measure(self) -> Fraction:
        return self.upper - self.lower

    def __contains__(self, x) -> bool:
        return self.lower <= x < self.upper


def _integer_root(n: int, k: int) -> int:
    """Largest m with m**k <= n."""
    if k == 1:
        return n
    m = int(round(n ** (1.0 / k)))
    while m ** k > n:
        m -= 1
    while (m + 1) ** k <= n:
        m += 1
    return m


def minimal_representative(b: int) -> int:
    """Least m >= 2 such that b is an integer power of m."""
    check_base(b)
    for k in range(b.bit_length(), 1, -1):
        m = _integer_root(b, k)
        if m >= 2 and m ** k == b:
            return m
    return b


def is_minimal_representative(b: int) -> bool:
    return minimal_representative(b) == b


def mult_dependent(a: int, b: int) -> bool:
    """True iff one base is a rational power of the other."""
    return minimal_representative(a) == minimal_representative(b)


@lru_cache(maxsize=None)
def scaled_index(b: int, r: int) -> int:
    """<b;r> = ceil(b / log r), certified by interval arithmetic.

    b / log r is never an integer for integers b >= 1, r >= 2 (e^(b/n) is
    transcendental), so the bracket always closes.
    """
    check_base(r)
    if b < 1:
        raise ValueError("scaled_index requires b >= 1")
    return certified_ceil(lambda ctx: b / ctx.log(r))


def scaled_index0(b: int, r: int) -> int:
    """scaled_index extended by <0;r> = 0, for stage bookkeeping."""
    return 0 if b == 0 else scaled_index(b, r)


def adic_value(w: DigitBlock) -> Fraction:
    """Value sum_j w_j * base^(-j) in [0, 1); the empty block maps to 0."""
    if not w.digits:
        return Fraction(0)
    num = 0
    for d in w.digits:
        num = num * w.base + d
    return Fraction(num, w.base ** len(w.digits))


def digits_of_fraction(x: Fraction, base: int, n: int) -> tuple[int, ...]:
    """First n digits of x in the given base; x must lie in [0, 1)."""
    check_base(base)
    if not 0 <= x < 1:
        raise ValueError("x must lie in [0,1)")
    p, q = x.numerator, x.denominator
    out = []
    for _ in range(n):
        p *= base
        d, p = divmod(p, q)
        out.append(d)
    return tuple(out)


def fractional_orbit(xi: Fraction, r: int, j_lo: int, j_hi: int) -> list[Fraction]:
    """({r^j xi}) for j = j_lo, ..., j_hi - 1, by exact multiply-and-reduce."""
    check_base(r)
    xi = Fraction(xi)
    if not 0 <= xi < 1:
        raise ValueError("xi must lie in [0,1)")
    if j_lo > j_hi or j_lo < 0:
        raise ValueError("need 0 <= j_lo <= j_hi")
    q = xi.denominator
    num = xi.numerator * pow(r, j_lo, q) % q if q > 1 else 0
    out = []
    for _ in range(j_lo, j_hi):
        out.append(Fraction(num, q))
        num = num * r % q
    return out


def minimal_representatives() -> Iterator[int]:
    """2, 3, 5, 6, 7, 10, ... : bases that are not proper powers."""
    return (b for b in itertools.count(2) if is_minimal_representative(b))


@lru_cache(maxsize=None)
def _nth_minimal_representative(j: int) -> int:
    return next(itertools.islice(minimal_representatives(), j, None))


def _diagonal_index(c: int) -> int:
    """Row-repetition index for 1-based position c: 0 | 0 1 | 0 1 2 | ...

    Every natural number appears infinitely often along the sequence.
    """
    if c < 1:
        raise ValueError("positions are 1-based")
    d = 0
    while (d + 1) * (d + 2) // 2 < c:
        d += 1
    return c - d * (d + 1) // 2 - 1


def repeating_enumeration_m(c: int) -> int:
    """c-th element (1-based) of the canonical enumeration of minimal
    representatives in which every element appears infinitely often."""
    return _nth_minimal_representative(_diagonal_index(c))


def repeating_enumeration_list(items: Sequence[int], c: int) -> int:
    """Same diagonal enumeration over a fixed finite list."""
    if not items:
        raise ValueError("empty enumeration")
    return items[_diagonal_index(c) % len(items)]
