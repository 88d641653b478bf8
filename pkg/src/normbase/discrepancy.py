"""Exact discrepancy kernels.

Everything here is exact rational arithmetic over half-open intervals
[u, v).  Suprema over interval endpoints are genuine suprema: one-sided
limits at data points are accounted for, so single-point sequences get
discrepancy 1 even though no interval attains it.

The production extreme/star paths use the sorted-point closed form

    D  = max(0, max_i (i/N - x_(i))) + max(0, max_i (x_(i) - (i-1)/N))
    D* = max(0, max_i (i/N - x_(i)),    max_i (x_(i) - (i-1)/N))

which follows from writing an interval's deviation as f(v) - f(u) for
f(v) = #{x_n < v}/N - v and taking sup f - inf f.  Two slower oracles (a
pair scan and endpoint enumeration with one-sided limits) are kept for
audits and are cross-asserted in the test suite.
"""

from __future__ import annotations

from bisect import bisect_left
from fractions import Fraction
from typing import Optional, Sequence

from .enclosure import certified_ceil, iv_from_fraction
from .numerics import DigitBlock, Interval, UnitSequence, check_base

__all__ = [
    "BlockStats",
    "extreme_discrepancy",
    "extreme_discrepancy_pairscan",
    "extreme_discrepancy_bruteforce",
    "star_discrepancy",
    "family_discrepancy",
    "equipartition",
    "partition_bound",
    "block_stats",
    "block_discrepancy",
    "simple_discrepancy",
    "perturbation_bound",
    "chain_bound",
    "transfer_length_bound",
    "avoidance_bound",
]


def _checked(seq: UnitSequence) -> list[Fraction]:
    if len(seq) == 0:
        raise ValueError("discrepancy of an empty sequence is undefined")
    out = [Fraction(x) for x in seq]
    for x in out:
        if not 0 <= x < 1:
            raise ValueError("sequence points must lie in [0,1)")
    return out


def _closed_form_parts(seq: UnitSequence) -> tuple[Fraction, Fraction]:
    xs = sorted(_checked(seq))
    n = len(xs)
    zero = Fraction(0)
    above = max(Fraction(i + 1, n) - x for i, x in enumerate(xs))
    below = max(x - Fraction(i, n) for i, x in enumerate(xs))
    return max(zero, above), max(zero, below)


def extreme_discrepancy(seq: UnitSequence, audit: bool = False) -> Fraction:
    """sup over [u,v) of |#{n : u <= x_n < v}/N - (v - u)|, exact.

    With ``audit=True`` the pair-scan and endpoint-enumeration oracles are
    evaluated as well and must agree exactly.
    """
    above, below = _closed_form_parts(seq)
    d = above + below
    if audit:
        assert d == extreme_discrepancy_pairscan(seq) == extreme_discrepancy_bruteforce(seq)
    return d


def star_discrepancy(seq: UnitSequence) -> Fraction:
    """sup over anchored intervals [0, v); satisfies D* <= D <= 2 D*."""
    above, below = _closed_form_parts(seq)
    return max(above, below)


def extreme_discrepancy_pairscan(seq: UnitSequence) -> Fraction:
    """O(N^2) sorted-pair closed form (audit path)."""
    xs = sorted(_checked(seq))
    n = len(xs)
    ys = [Fraction(0)] + xs + [Fraction(1)]
    best = Fraction(0)
    # dense side: smallest interval catching points i..j
    for i in range(1, n + 1):
        for j in range(i, n + 1):
            v = Fraction(j - i + 1, n) - (ys[j] - ys[i])
            if v > best:
                best = v
    # sparse side: largest gap excluding interior points, boundaries allowed
    for i in range(0, n + 2):
        for j in range(i + 1, n + 2):
            v = (ys[j] - ys[i]) - Fraction(max(j - i - 1, 0), n)
            if v > best:
                best = v
    return min(best, Fraction(1))


def extreme_discrepancy_bruteforce(seq: UnitSequence) -> Fraction:
    """Endpoint enumeration with one-sided limit adjustments (audit oracle)."""
    xs = sorted(_checked(seq))
    n = len(xs)
    values = sorted(set(xs) | {Fraction(0), Fraction(1)})
    best = Fraction(0)
    for ia, a in enumerate(values):
        c_lt_a = bisect_left(xs, a)
        c_le_a = c_lt_a + _count_eq(xs, a, c_lt_a)
        for b in values[ia:]:
            c_lt_b = bisect_left(xs, b)
            c_le_b = c_lt_b + _count_eq(xs, b, c_lt_b)
            length = b - a
            # endpoint variants: [a,b), [a,b+), (a,b), (a,b+)
            for count in (c_lt_b - c_lt_a, c_le_b - c_lt_a, c_lt_b - c_le_a, c_le_b - c_le_a):
                v = abs(Fraction(count, n) - length)
                if v > best:
                    best = v
    return best


def _count_eq(xs, v, start) -> int:
    c = 0
    for i in range(start, len(xs)):
        if xs[i] == v:
            c += 1
        else:
            break
    return c


def family_discrepancy(family: Sequence[Interval], seq: UnitSequence) -> Fraction:
    """max over I in the family of |#{n : x_n in I}/N - measure(I)|."""
    if len(family) == 0:
        raise ValueError("empty interval family")
    xs = sorted(_checked(seq))
    n = len(xs)
    best = Fraction(0)
    for iv in family:
        count = bisect_left(xs, iv.upper) - bisect_left(xs, iv.lower)
        v = abs(Fraction(count, n) - iv.measure)
        if v > best:
            best = v
    return best


def equipartition(n: int) -> list[Interval]:
    """The n half-open cells [a/n, (a+1)/n)."""
    if n < 1:
        raise ValueError("need n >= 1")
    return [Interval(Fraction(a, n), Fraction(a + 1, n)) for a in range(n)]


def partition_bound(eps: Fraction, seq: UnitSequence) -> tuple[Fraction, Optional[Fraction]]:
    """Family discrepancy over the ceil(3/eps) equal cells, and the implied
    extreme-discrepancy bound eps when the family value is < (eps/3)^2."""
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise ValueError("need 0 < eps < 1")
    ncells = _ceil_frac(Fraction(3) / eps)
    fam = family_discrepancy(equipartition(ncells), seq)
    return fam, (eps if fam < (eps / 3) ** 2 else None)


def _ceil_frac(q: Fraction) -> int:
    return -((-q.numerator) // q.denominator)


class BlockStats:
    """Overlapping occurrence counts of all length-l blocks of a word."""

    def __init__(self, w: DigitBlock, block_length: int):
        if block_length < 1:
            raise ValueError("block length must be >= 1")
        if block_length > len(w):
            raise ValueError("block longer than the word")
        self.block_length = block_length
        self.base = w.base
        self.word_length = len(w)
        counts: dict[tuple[int, ...], int] = {}
        d = w.digits
        for i in range(len(d) - block_length + 1):
            key = d[i:i + block_length]
            counts[key] = counts.get(key, 0) + 1
        self.counts = counts

    @property
    def window_count(self) -> int:
        return self.word_length - self.block_length + 1


def block_stats(w: DigitBlock, ell: int) -> BlockStats:
    return BlockStats(w, ell)


def block_discrepancy(w: DigitBlock, ell: int) -> Fraction:
    """max over blocks u of length ell of |occ(w,u)/|w| - base^(-ell)|.

    Occurrence counting is overlapping and the denominator is the full word
    length |w| (not the window count).
    """
    stats = BlockStats(w, ell)
    n = stats.word_length
    target = Fraction(1, w.base ** ell)
    best = max(abs(Fraction(c, n) - target) for c in stats.counts.values())
    if len(stats.counts) < w.base ** ell:
        best = max(best, target)  # some block never occurs
    return best


def simple_discrepancy(seq: UnitSequence, r: int) -> Fraction:
    """Family discrepancy over the r cells [a/r, (a+1)/r)."""
    check_base(r)
    return family_discrepancy(equipartition(r), seq)


def perturbation_bound(eps: Fraction, n_total: int, n_extra: int) -> bool:
    """True iff n_extra < eps * n_total, licensing the 2*eps bound for
    prepending or appending up to n_extra points to a length-n_total
    sequence of discrepancy < eps."""
    if n_total < 1:
        raise ValueError("need a nonempty base sequence")
    return n_extra < Fraction(eps) * n_total


def chain_bound(eps: Fraction,
                breakpoints: Sequence[int],
                block_discrepancies: Sequence[Fraction]) -> Optional[Fraction]:
    """Certificate 2*eps when consecutive breakpoints satisfy
    b_{m+1} - b_m <= eps*b_m and every block discrepancy is < eps.

    This is a hypothesis checker over finite data; it does not (and cannot)
    evaluate the limit statement itself.
    """
    eps = Fraction(eps)
    bps = list(breakpoints)
    vals = [Fraction(v) for v in block_discrepancies]
    if len(vals) != max(len(bps) - 1, 0):
        raise ValueError("need exactly one block discrepancy per breakpoint gap")
    if any(b2 <= b1 for b1, b2 in zip(bps, bps[1:])):
        raise ValueError("breakpoints must be strictly increasing")
    for (b1, b2), v in zip(zip(bps, bps[1:]), vals):
        if b2 - b1 > eps * b1:
            return None
        if not v < eps:
            return None
    return 2 * eps


def transfer_length_bound(r: int, eps: Fraction) -> tuple[int, int]:
    """(ell0, n_cells) for the window-transfer estimate: any real within
    one working-grid cell of a rational whose orbit window has family
    discrepancy < (eps/10)^4 over the n_cells equal cells inherits window
    discrepancy < eps, provided the window length is at least ell0.

    ell0 = ceil(log r + (18/eps^2) ceil(log ceil(100/eps^2) + 3 log r)),
    n_cells = ceil(100/eps^2); both ceilings certified.
    """
    check_base(r)
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise ValueError("need 0 < eps < 1")
    n_cells = _ceil_frac(Fraction(100) / eps ** 2)
    inner = certified_ceil(lambda ctx: ctx.log(n_cells) + 3 * ctx.log(r))
    scale = Fraction(18) / eps ** 2
    ell0 = certified_ceil(lambda ctx: ctx.log(r)
                          + iv_from_fraction(ctx, scale) * inner)
    return ell0, n_cells


def avoidance_bound(interval: Interval, seq: UnitSequence, m: int) -> Optional[Fraction]:
    """Certified lower bound measure(I)/2 on the family discrepancy of {I}
    when the sequence has length N >= ceil(2m/measure(I)) and avoids I from
    position m (1-based) onward; None when the hypotheses fail."""
    if m < 1:
        raise ValueError("m must be >= 1")
    xs = _checked(seq)
    n = len(xs)
    needed = _ceil_frac(Fraction(2 * m) / interval.measure)
    if n < needed:
        return None
    if any(x in interval for x in xs[m - 1:]):
        return None
    return interval.measure / 2
