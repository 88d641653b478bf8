"""Certified real-number enclosures.

Every irrational quantity that feeds an integer decision (a ceiling of a
logarithm, a frequency threshold, the cosine product constant) is evaluated
with interval arithmetic at escalating precision until the decision is
provable.  Exact rational state lives in ``fractions.Fraction``; nothing in
this module ever rounds silently.

The fast floating-point summation paths elsewhere in the package lean on the
error-model constants defined at the bottom of this file.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import mpmath.libmp as _libmp
from mpmath.ctx_iv import MPIntervalContext

__all__ = [
    "ApproxReal",
    "PrecisionError",
    "certified_ceil",
    "fraction_bounds",
    "iv_context",
    "iv_from_fraction",
    "ceil_fraction",
    "floor_fraction",
    "PHASE_ERR",
    "TRIG_ERR",
    "TERM_ERR",
]

MAX_PREC = 1 << 16


class PrecisionError(ArithmeticError):
    """Escalating working precision hit the configured cap without a verdict."""


def iv_context(prec: int) -> MPIntervalContext:
    ctx = MPIntervalContext()
    ctx.prec = prec
    return ctx


def fraction_bounds(x) -> tuple[Fraction, Fraction]:
    """Exact rational endpoints of an interval-arithmetic value."""
    lo_raw, hi_raw = x._mpi_
    plo, qlo = _libmp.to_rational(lo_raw)
    phi, qhi = _libmp.to_rational(hi_raw)
    return Fraction(int(plo), int(qlo)), Fraction(int(phi), int(qhi))


def iv_from_fraction(ctx: MPIntervalContext, q: Fraction):
    return ctx.mpf(int(q.numerator)) / int(q.denominator)


def ceil_fraction(q: Fraction) -> int:
    return -((-q.numerator) // q.denominator)


def floor_fraction(q: Fraction) -> int:
    return q.numerator // q.denominator


def certified_ceil(build: Callable[[MPIntervalContext], object], start_prec: int = 80) -> int:
    """Least integer >= the real number computed by ``build``.

    ``build(ctx)`` must return an interval value enclosing a quantity that is
    provably not an integer (the package only uses this for b/log r and for
    sums of logarithms of integers >= 2, which are transcendental).  Precision
    doubles until the bracket pins the ceiling.
    """
    prec = start_prec
    while prec <= MAX_PREC:
        lo, hi = fraction_bounds(build(iv_context(prec)))
        clo, chi = ceil_fraction(lo), ceil_fraction(hi)
        if clo == chi:
            return clo
        prec *= 2
    raise PrecisionError("ceiling bracket would not close below prec %d" % MAX_PREC)


def certified_strict_floor_plus_one(build: Callable[[MPIntervalContext], object],
                                    start_prec: int = 80) -> int:
    """Least integer strictly greater than the enclosed quantity.

    Unlike :func:`certified_ceil` this never needs the quantity to be
    non-integral: it returns ``floor(upper) + 1``, which is a valid "least
    integer greater than" once the bracket is tighter than 1.  Used for the
    report-only length budgets where outward rounding is safe.
    """
    prec = start_prec
    while prec <= MAX_PREC:
        lo, hi = fraction_bounds(build(iv_context(prec)))
        if floor_fraction(hi) - floor_fraction(lo) == 0 or (hi - lo) < 1:
            return floor_fraction(hi) + 1
        prec *= 2
    raise PrecisionError("bracket wider than 1 at prec %d" % MAX_PREC)


@dataclass(frozen=True)
class ApproxReal:
    """A real number known to lie in [midpoint - radius, midpoint + radius]."""

    midpoint: Fraction
    radius: Fraction

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("radius must be nonnegative")

    @classmethod
    def from_bounds(cls, lo: Fraction, hi: Fraction) -> "ApproxReal":
        lo, hi = Fraction(lo), Fraction(hi)
        if hi < lo:
            raise ValueError("empty enclosure")
        return cls((lo + hi) / 2, (hi - lo) / 2)

    @classmethod
    def from_iv(cls, x) -> "ApproxReal":
        return cls.from_bounds(*fraction_bounds(x))

    @property
    def lower(self) -> Fraction:
        return self.midpoint - self.radius

    @property
    def upper(self) -> Fraction:
        return self.midpoint + self.radius

    def contains(self, x) -> bool:
        return self.lower <= Fraction(x) <= self.upper

    def encloses(self, other: "ApproxReal") -> bool:
        return self.lower <= other.lower and other.upper <= self.upper

    def compare(self, threshold: Fraction):
        """-1 if provably < threshold, +1 if provably >= threshold, else None."""
        t = Fraction(threshold)
        if self.upper < t:
            return -1
        if self.lower >= t:
            return 1
        return None

    def __float__(self) -> float:
        return float(self.midpoint)

    def __repr__(self) -> str:
        return "ApproxReal(%s +/- %s)" % (float(self.midpoint), float(self.radius))


# Error model for the float64 fast paths.
#
# Phases are produced from exact rationals by taking the top 64 bits of
# numerator and denominator and dividing; the result is within 2^-60 of the
# true fractional part.  libm sin/cos of arguments in [0, 2*pi) are assumed
# within 2^-50 absolute (glibc stays within 2 ulp; this leaves a wide margin).
# One complex unit-circle term e(phase) is then within TERM_ERR of the truth.
PHASE_ERR = 2.0 ** -60
TRIG_ERR = 2.0 ** -50
TERM_ERR = 2 * math.pi * PHASE_ERR + 2 * TRIG_ERR


def sum_term_error(n_terms: int) -> float:
    """Per-sum absolute error bound for adding n unit-circle terms in float64."""
    # n * TERM_ERR for the terms themselves plus n^2 * eps for summation
    # rounding (partial sums are bounded by n).
    return n_terms * TERM_ERR + (n_terms * n_terms) * 2.0 ** -52


def abs_sq_enclosure(s_re: float, s_im: float, s_err: float) -> ApproxReal:
    """Enclosure of |S|^2 given a float estimate of S and an error bound."""
    mid = Fraction(s_re) ** 2 + Fraction(s_im) ** 2
    mag = math.hypot(s_re, s_im)
    rad = Fraction(2 * (mag + s_err) * s_err + s_err * s_err)
    return ApproxReal(mid, rad)


def float_fraction_ratio(num: int, den: int) -> float:
    """num/den in [0, 1) as a float within PHASE_ERR, for huge integers."""
    if num == 0:
        return 0.0
    shift = den.bit_length() - 64
    if shift <= 0:
        return num / den
    return (num >> shift) / (den >> shift)
