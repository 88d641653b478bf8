"""Digit-stream analysis: discrepancy traces over checkpoints.

Given a digit expansion, evaluates star / extreme / simple discrepancy of
the digit-shift orbit at a schedule of checkpoints (geometric by default),
in the expansion's own base or any other base.  Exact rational values up to
a configurable size cap; above it, star discrepancy falls back to a float64
path whose error (< 1e-9 for any realistic trace) is dominated by the
12-digit CSV rendering.

The CSV schema is fixed: ``N,base,star,extreme,simple,block_C,block_ell``
with missing values rendered as empty fields.
"""

from __future__ import annotations

import decimal
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import IO, Optional, Sequence

from .discrepancy import block_discrepancy, extreme_discrepancy, simple_discrepancy, star_discrepancy
from .numerics import DigitBlock, check_base

__all__ = [
    "TraceRow",
    "checkpoints",
    "trace_digits",
    "write_csv",
    "orbit_points",
    "star_discrepancy_float",
    "champernowne_digits",
    "CSV_HEADER",
]

CSV_HEADER = "N,base,star,extreme,simple,block_C,block_ell"
EXACT_CAP_DEFAULT = 5000


@dataclass
class TraceRow:
    n: int
    base: int
    star: Optional[Fraction]
    extreme: Optional[Fraction]
    simple: Optional[Fraction]
    block_c: Optional[Fraction] = None
    block_ell: Optional[int] = None


def checkpoints(total: int, mode: str = "geometric", start: int = 64,
                ratio: int = 2, step: int = 1000) -> list[int]:
    """Checkpoint schedule up to ``total`` (inclusive as the last point)."""
    if total < 1:
        return []
    out: list[int] = []
    if mode == "geometric":
        n = start
        while n < total:
            out.append(n)
            n *= ratio
    elif mode == "linear":
        n = step
        while n < total:
            out.append(n)
            n += step
    else:
        raise ValueError("unknown checkpoint mode %r" % mode)
    if not out or out[-1] != total:
        out.append(total)
    return [n for n in out if n >= 1]


def orbit_points(digits: DigitBlock, base: int, n: int) -> list[Fraction]:
    """First n points of the orbit {base^j eta} for eta the value of the
    digit string, as exact rationals.

    In the stream's own base these are digit suffixes.  In a foreign base
    the usable orbit length is limited by the stream's precision: position j
    is only trusted while base^j times the truncation error stays below
    2^-40, and points beyond that limit raise."""
    src = digits.base
    length = len(digits)
    if base == src:
        if n > length:
            raise ValueError("stream has only %d digits" % length)
        num = 0
        for d in digits.digits:
            num = num * src + d
        den = src ** length
        pts = []
        for _ in range(n):
            pts.append(Fraction(num, den))
            den //= src
            num %= den
        return pts
    check_base(base)
    num = 0
    for d in digits.digits:
        num = num * src + d
    eta = Fraction(num, src ** length)
    usable = int((length * math.log(src) - 40 * math.log(2)) / math.log(base))
    if n > max(usable, 0):
        raise ValueError("stream precision supports only %d base-%d orbit points" % (usable, base))
    q = eta.denominator
    cur = eta.numerator % q
    pts = []
    for _ in range(n):
        pts.append(Fraction(cur, q))
        cur = cur * base % q
    return pts


def star_discrepancy_float(points_float: Sequence[float]) -> float:
    """Float64 star discrepancy of pre-sorted-or-not unit points."""
    xs = sorted(points_float)
    n = len(xs)
    above = max((i + 1) / n - x for i, x in enumerate(xs))
    below = max(x - i / n for i, x in enumerate(xs))
    return max(0.0, above, below)


def trace_digits(digits: DigitBlock, bases: Sequence[int], ns: Sequence[int],
                 exact_cap: int = EXACT_CAP_DEFAULT,
                 block_ell: Optional[int] = None) -> list[TraceRow]:
    """One TraceRow per (checkpoint, base).

    Extreme discrepancy is computed only for N <= exact_cap (exact values);
    star is exact under the cap and float-path above it; simple discrepancy
    is always exact.  Block discrepancy applies to the stream's own base
    only, when ``block_ell`` is given.
    """
    rows: list[TraceRow] = []
    for base in bases:
        for n in sorted(set(ns)):
            try:
                pts = orbit_points(digits, base, n) if n <= exact_cap else None
            except ValueError:
                continue
            if pts is not None:
                star = star_discrepancy(pts)
                extreme = extreme_discrepancy(pts)
                simple = simple_discrepancy(pts, base)
            else:
                fl = _orbit_floats(digits, base, n)
                if fl is None:
                    continue
                star = Fraction(star_discrepancy_float(fl))
                extreme = None
                simple = _simple_from_floats(fl, base)
            row = TraceRow(n=n, base=base, star=star, extreme=extreme, simple=simple)
            if block_ell is not None and base == digits.base and block_ell <= n:
                prefix = DigitBlock(digits.base, digits.digits[:n])
                row.block_c = block_discrepancy(prefix, block_ell)
                row.block_ell = block_ell
            rows.append(row)
    return rows


def _orbit_floats(digits: DigitBlock, base: int, n: int) -> Optional[list[float]]:
    src = digits.base
    length = len(digits)
    if base == src:
        if n > length:
            return None
        # float of the suffix value from 64 guard digits
        out = []
        for j in range(n):
            v = 0.0
            scale = 1.0
            for i in range(j, min(j + 40, length)):
                scale /= src
                v += digits.digits[i] * scale
            out.append(v)
        return out
    num = 0
    for d in digits.digits:
        num = num * src + d
    q = src ** length
    usable = int((length * math.log(src) - 40 * math.log(2)) / math.log(base))
    if n > usable:
        return None
    cur = num % q
    qbits = q.bit_length()
    out = []
    for _ in range(n):
        shift = qbits - 64
        out.append((cur >> shift) / (q >> shift) if shift > 0 else cur / q)
        cur = cur * base % q
    return out


def _simple_from_floats(fl: Sequence[float], base: int) -> Fraction:
    counts = [0] * base
    for x in fl:
        idx = min(int(x * base), base - 1)
        counts[idx] += 1
    n = len(fl)
    return max(abs(Fraction(c, n) - Fraction(1, base)) for c in counts)


def _decimal12(q: Optional[Fraction]) -> str:
    if q is None:
        return ""
    ctx = decimal.Context(prec=12, rounding=decimal.ROUND_HALF_EVEN)
    return str(ctx.divide(decimal.Decimal(q.numerator), decimal.Decimal(q.denominator)))


def write_csv(rows: Sequence[TraceRow], fp: IO[str], exact: bool = False) -> None:
    """Render rows with 12-significant-digit decimals (round half even), or
    exact p/q with ``exact=True``.  Missing values are empty fields."""
    fp.write(CSV_HEADER + "\n")
    for r in rows:
        if exact:
            def fmt(q):
                return "" if q is None else "%d/%d" % (q.numerator, q.denominator)
        else:
            fmt = _decimal12
        fields = [str(r.n), str(r.base), fmt(r.star), fmt(r.extreme), fmt(r.simple),
                  fmt(r.block_c), "" if r.block_ell is None else str(r.block_ell)]
        fp.write(",".join(fields) + "\n")


def champernowne_digits(base: int, n: int) -> DigitBlock:
    """First n digits of the base-b concatenation 0.1 2 3 ... (the classic
    normal-number example stream, handy for demos and analyzer tests)."""
    check_base(base)
    out: list[int] = []
    value = 1
    while len(out) < n:
        v = value
        part: list[int] = []
        while v:
            v, r = divmod(v, base)
            part.append(r)
        out.extend(reversed(part))
        value += 1
    return DigitBlock(base, tuple(out[:n]))
