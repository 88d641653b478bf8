"""Adic interval geometry.

Finding adic subintervals across bases and computing the refinement offsets
and paddings that glue construction stages together.  All endpoints are
exact rationals; "leftmost" tie-breaking everywhere keeps runs reproducible
bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .enclosure import certified_ceil
from .numerics import Interval, check_base, scaled_index, scaled_index0

__all__ = [
    "AdicInterval",
    "adic_subinterval",
    "nested_refinement_offset",
    "nested_refinement",
    "padding",
    "leftmost_cell_index",
]


@dataclass(frozen=True)
class AdicInterval:
    """[index * L, (index+1) * L) with L = (base^power)^(-depth)."""

    base: int
    power: int
    depth: int
    index: int

    def __post_init__(self):
        check_base(self.base)
        if self.power < 1:
            raise ValueError("power must be >= 1")
        if self.depth < 0:
            raise ValueError("depth must be >= 0")
        if not 0 <= self.index < (self.base ** self.power) ** self.depth:
            raise ValueError("index out of range for depth")

    @property
    def radix(self) -> int:
        return self.base ** self.power

    @property
    def measure(self) -> Fraction:
        return Fraction(1, self.radix ** self.depth)

    @property
    def lower(self) -> Fraction:
        return self.index * self.measure

    @property
    def upper(self) -> Fraction:
        return (self.index + 1) * self.measure

    def as_interval(self) -> Interval:
        return Interval(self.lower, self.upper)

    def contains_interval(self, other: "AdicInterval") -> bool:
        return self.lower <= other.lower and other.upper <= self.upper


def leftmost_cell_index(lo: Fraction, hi: Fraction, radix: int, depth: int) -> Optional[int]:
    """Index of the leftmost radix-adic cell of the given depth inside
    [lo, hi), or None when no cell fits."""
    scale = radix ** depth
    idx = -((-lo.numerator * scale) // lo.denominator)  # ceil(lo * scale)
    if Fraction(idx + 1, scale) <= hi:
        return idx
    return None


def _is_adic(interval: Interval, s: int) -> Optional[AdicInterval]:
    mu = interval.measure
    if mu.numerator != 1:
        return None
    den = mu.denominator
    depth = 0
    while den > 1:
        den, r = divmod(den, s)
        if r:
            return None
        depth += 1
    idx = interval.lower / interval.measure
    if idx.denominator != 1:
        return None
    return AdicInterval(s, 1, depth, int(idx))


def adic_subinterval(interval: Interval, s: int) -> AdicInterval:
    """An s-adic subinterval of length >= measure(interval) / (2s).

    If the input is itself s-adic it is returned unchanged.  Otherwise, with
    m least such that s^-m < measure: either the leftmost depth-m cell that
    fits, or the half-cell at depth m+1 adjacent to the unique depth-m grid
    point inside the interval (left half preferred).
    """
    check_base(s)
    found = _is_adic(interval, s)
    if found is not None:
        return found
    lo, hi = interval.lower, interval.upper
    mu = interval.measure
    m = 0
    while Fraction(1, s ** m) >= mu:
        m += 1
    idx = leftmost_cell_index(lo, hi, s, m)
    if idx is not None:
        return AdicInterval(s, 1, m, idx)
    # no depth-m cell fits: a unique grid point a/s^m lies inside; one of its
    # two depth-(m+1) half-cells does fit (total width 2 s^-(m+1) < measure)
    scale = s ** m
    a = -((-lo.numerator * scale) // lo.denominator)
    if not lo <= Fraction(a, scale) < hi:
        raise AssertionError("no grid point inside a non-adic interval wider than a cell")
    left = AdicInterval(s, 1, m + 1, a * s - 1)
    if interval.lower <= left.lower and left.upper <= interval.upper:
        return left
    right = AdicInterval(s, 1, m + 1, a * s)
    if interval.lower <= right.lower and right.upper <= interval.upper:
        return right
    raise AssertionError("neither half-cell fits; violates the subinterval guarantee")


@lru_cache(maxsize=None)
def nested_refinement_offset(s0: int, s1: int) -> int:
    """ceil(log s0 + 3 log s1), certified (never an integer for bases >= 2)."""
    check_base(s0)
    check_base(s1)
    return certified_ceil(lambda ctx: ctx.log(s0) + 3 * ctx.log(s1))


def nested_refinement(cell: AdicInterval, b: int, s1: int) -> tuple[int, AdicInterval]:
    """Leftmost s1-adic subcell at scaled depth <a;s1> of an s0-adic cell at
    scaled depth <b;s0>, with a = b + ceil(log s0 + 3 log s1).

    The input must have depth <b;s0> in its own radix.  Nonexistence of the
    subcell would contradict the refinement guarantee and raises.
    """
    check_base(s1)
    s0 = cell.radix
    if cell.depth != scaled_index0(b, s0):
        raise ValueError("cell depth %d is not <%d;%d>" % (cell.depth, b, s0))
    a = b + nested_refinement_offset(s0, s1)
    depth = scaled_index(a, s1)
    idx = leftmost_cell_index(cell.lower, cell.upper, s1, depth)
    if idx is None:
        raise AssertionError("refinement guarantee violated for b=%d, s0=%d, s1=%d" % (b, s0, s1))
    return a, AdicInterval(s1, 1, depth, idx)


def padding(s0: int, s1: int) -> int:
    """p(s0, s1) = 2 ceil(log s0 + 3 log s1): how many scaled positions a
    base change can consume in any third base."""
    return 2 * nested_refinement_offset(s0, s1)
