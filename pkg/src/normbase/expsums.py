"""Weyl exponential sums and the thresholds derived from them.

Notation: e(x) = exp(2*pi*i*x).  Rational arguments are reduced mod 1
exactly before any trigonometric evaluation.  Two evaluation engines back
every sum:

* ``interval`` -- mpmath interval arithmetic at escalating precision; the
  returned enclosure radius meets the caller's request.
* ``fast`` -- float64 with a conservative, explicitly derived error radius
  (see ``enclosure``); used for bulk candidate scoring where margins are
  many orders of magnitude wider than the error.

Threshold comparisons always use the enclosure: pass iff the upper bound is
below the threshold, fail iff the lower bound is at or above it, and
escalate precision otherwise.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .enclosure import (
    MAX_PREC,
    ApproxReal,
    PrecisionError,
    abs_sq_enclosure,
    ceil_fraction,
    floor_fraction,
    float_fraction_ratio,
    fraction_bounds,
    iv_context,
    iv_from_fraction,
    sum_term_error,
)
from .numerics import (
    AdicRational,
    DigitBlock,
    UnitSequence,
    check_base,
    minimal_representative,
    scaled_index,
    scaled_index0,
)

__all__ = [
    "LevequeParams",
    "SchmidtConfig",
    "SurveyResult",
    "leveque_parameters",
    "weyl_power",
    "leveque_bound",
    "window",
    "exp_sum_A",
    "cosine_constant",
    "schmidt_p",
    "majority_length_bound",
    "candidate_survey",
    "restricted_alphabet_size",
]

DEFAULT_PRECISION = Fraction(1, 10 ** 9)


@dataclass(frozen=True)
class LevequeParams:
    """Frequency set T = {1..m} and threshold delta.

    If (1/N^2)|sum_j e(t x_j)|^2 < delta for every t in T then the extreme
    discrepancy of (x_j) is below ``source_eps``.  ``delta`` is stored as a
    certified rational lower bound (rounding down only strengthens the test).
    """

    m: int
    delta: Fraction
    source_eps: Fraction

    @property
    def T(self) -> range:
        return range(1, self.m + 1)

    def __iter__(self):
        return iter(self.T)


@dataclass(frozen=True)
class SchmidtConfig:
    """Per-run constant c of the multiplicative-independence sum bound.

    The constant exists and is computable in principle (Schmidt 1961), but no
    closed form is available here, so it is configuration: used only in the
    report-only length budgets and in the survey threshold ell^(2 - c/4).
    """

    c: Fraction = Fraction(1, 100)

    def __post_init__(self):
        if not 0 < Fraction(self.c) < Fraction(1, 2):
            raise ValueError("need 0 < c < 1/2")


def leveque_parameters(eps: Fraction) -> LevequeParams:
    """(T, delta) with m = ceil(12/(eps^3 pi^2)) and delta = eps^3 pi^2/(24 m).

    Derived from LeVeque's inequality by splitting the frequency sum at m and
    bounding the tail by 1/(m+1).
    """
    eps = Fraction(eps)
    if not 0 < eps <= 1:
        raise ValueError("need 0 < eps <= 1")
    cube = eps ** 3
    prec = 80
    while True:
        ctx = iv_context(prec)
        lo, hi = fraction_bounds(12 / (iv_from_fraction(ctx, cube) * ctx.pi ** 2))
        if ceil_fraction(lo) == ceil_fraction(hi):
            m = ceil_fraction(lo)
            break
        prec *= 2
        if prec > MAX_PREC:
            raise PrecisionError("could not pin ceil(12/(eps^3 pi^2))")
    ctx = iv_context(128)
    delta_lo, _ = fraction_bounds(iv_from_fraction(ctx, cube) * ctx.pi ** 2 / (24 * m))
    return LevequeParams(m=m, delta=delta_lo, source_eps=eps)


def _reduced(x: Fraction) -> Fraction:
    return Fraction(x.numerator % x.denominator, x.denominator)


def _weyl_sum_interval(args: Iterable[Fraction], prec: int):
    """Interval (re, im) of sum e(arg), caching repeated arguments."""
    ctx = iv_context(prec)
    two_pi = 2 * ctx.pi
    re = ctx.mpf(0)
    im = ctx.mpf(0)
    for arg, mult in Counter(_reduced(a) for a in args).items():
        theta = two_pi * iv_from_fraction(ctx, arg)
        re += mult * ctx.cos(theta)
        im += mult * ctx.sin(theta)
    return re, im


def _fast_sum_sq(args: Sequence[Fraction]) -> ApproxReal:
    phases = np.array([float_fraction_ratio(a.numerator, a.denominator) for a in args])
    angle = 2 * math.pi * phases
    return abs_sq_enclosure(float(np.cos(angle).sum()), float(np.sin(angle).sum()),
                            sum_term_error(len(args)))


def weyl_power(seq: UnitSequence, t: int, precision: Fraction = DEFAULT_PRECISION,
               method: str = "auto") -> ApproxReal:
    """Certified enclosure of (1/N^2) |sum_j e(t x_j)|^2."""
    if t == 0:
        raise ValueError("t must be a nonzero integer")
    n = len(seq)
    if n == 0:
        raise ValueError("empty sequence")
    precision = Fraction(precision)
    if precision <= 0:
        raise ValueError("precision must be positive")
    args = [_reduced(t * Fraction(x)) for x in seq]
    if method in ("auto", "fast"):
        enc = _fast_sum_sq(args)
        result = ApproxReal(enc.midpoint / n ** 2, enc.radius / n ** 2)
        if result.radius <= precision or method == "fast":
            return result
    prec = 100
    while prec <= MAX_PREC:
        re, im = _weyl_sum_interval(args, prec)
        lo, hi = fraction_bounds((re ** 2 + im ** 2) / n ** 2)
        result = ApproxReal.from_bounds(max(lo, Fraction(0)), hi)
        if result.radius <= precision:
            return result
        prec *= 2
    raise PrecisionError("weyl_power enclosure would not tighten to %s" % precision)


def leveque_bound(seq: UnitSequence, m: int, precision: Fraction = DEFAULT_PRECISION) -> ApproxReal:
    """Upper enclosure of the truncated LeVeque bound

        (6/pi^2 (sum_{h<=m} h^-2 W_h + 1/(m+1)))^(1/3)

    with W_h the normalized Weyl power; always an upper bound on the extreme
    discrepancy of the sequence.
    """
    if m < 1:
        raise ValueError("need m >= 1")
    powers = [weyl_power(seq, h, precision) for h in range(1, m + 1)]
    prec = 100
    while prec <= MAX_PREC:
        ctx = iv_context(prec)
        total = iv_from_fraction(ctx, Fraction(1, m + 1))
        for h, w in enumerate(powers, start=1):
            total += iv_from_fraction(ctx, w.upper) / (h * h)
        lo, hi = fraction_bounds(ctx.exp(ctx.log(6 * total / ctx.pi ** 2) / 3))
        result = ApproxReal.from_bounds(max(lo, Fraction(0)), hi)
        if result.radius <= precision:
            return result
        prec *= 2
    raise PrecisionError("leveque_bound enclosure would not tighten")


def window(a: int, ell: int, r: int) -> tuple[int, int]:
    """Summation window (<a;r>, <a+ell;r>] as a half-open python range pair."""
    return scaled_index0(a, r) + 1, scaled_index(a + ell, r) + 1


def _window_args(xi: Fraction, r: int, t: int, a: int, ell: int) -> list[Fraction]:
    j0, j1 = window(a, ell, r)
    q = xi.denominator
    num = xi.numerator * t % q * pow(r, j0, q) % q if q > 1 else 0
    out = []
    for _ in range(j0, j1):
        out.append(Fraction(num, q))
        num = num * r % q
    return out


def exp_sum_A(xi: Fraction, R: Sequence[int], T: Iterable[int], a: int, ell: int,
              precision: Fraction = DEFAULT_PRECISION, method: str = "auto") -> ApproxReal:
    """Enclosure of A(xi, R, T, a, ell) = sum_{t,r} |sum_{j in window} e(r^j t xi)|^2.

    The inner window for base r runs over <a;r> < j <= <a+ell;r>; arguments
    are reduced mod 1 exactly before evaluation.
    """
    if ell < 1:
        raise ValueError("need ell >= 1")
    R = sorted(set(int(r) for r in R))
    ts = sorted(set(int(t) for t in T))
    if not R or not ts:
        raise ValueError("R and T must be nonempty")
    xi = _reduced(Fraction(xi))
    precision = Fraction(precision)

    if method in ("auto", "fast"):
        mid = Fraction(0)
        rad = Fraction(0)
        for r in R:
            for t in ts:
                enc = _fast_sum_sq(_window_args(xi, r, t, a, ell))
                mid += enc.midpoint
                rad += enc.radius
        result = ApproxReal(mid, rad)
        if result.radius <= precision or method == "fast":
            return result

    prec = 100
    while prec <= MAX_PREC:
        lo_sum = Fraction(0)
        hi_sum = Fraction(0)
        for r in R:
            for t in ts:
                re, im = _weyl_sum_interval(_window_args(xi, r, t, a, ell), prec)
                lo, hi = fraction_bounds(re ** 2 + im ** 2)
                lo_sum += max(lo, Fraction(0))
                hi_sum += hi
        result = ApproxReal.from_bounds(lo_sum, hi_sum)
        if result.radius <= precision:
            return result
        prec *= 2
    raise PrecisionError("exp_sum_A enclosure would not tighten to %s" % precision)


def cosine_constant(precision: Fraction = Fraction(1, 10 ** 12)) -> ApproxReal:
    """Enclosure of (prod_{k>=1} cos(pi 2^-(k+1)))^(-1).

    Monotone partial products plus the tail bound
    prod_{k>K} cos(pi 2^-(k+1)) >= 1 - pi^2 / (6 * 2^(2K+2)).
    (The product telescopes to 2/pi by Viete's identity; the tests use that
    as an independent oracle.)  Successive refinements are intersected, so
    enclosures at decreasing precision requests are nested.
    """
    precision = Fraction(precision)
    if precision <= 0:
        raise ValueError("precision must be positive")
    prec, terms = 100, 8
    best: Optional[ApproxReal] = None
    while prec <= MAX_PREC:
        ctx = iv_context(prec)
        prod = ctx.mpf(1)
        for k in range(1, terms + 1):
            prod *= ctx.cos(ctx.pi / (1 << (k + 1)))
        tail_defect = ctx.pi ** 2 / (6 * (1 << (2 * terms + 2)))
        lo_prod, _ = fraction_bounds(prod * (1 - tail_defect))
        _, hi_prod = fraction_bounds(prod)
        if lo_prod > 0:
            enc = ApproxReal.from_bounds(1 / hi_prod, 1 / lo_prod)
            if best is not None:
                enc = ApproxReal.from_bounds(max(best.lower, enc.lower),
                                             min(best.upper, enc.upper))
            best = enc
            if best.radius <= precision:
                return best
        prec *= 2
        terms *= 2
    raise PrecisionError("cosine_constant enclosure would not tighten")


def schmidt_p(R: Sequence[int], T: Iterable[int], s: int) -> int:
    """Least p with r^(p-1) >= 2|t| for all r in R, t in T and r^p >= s^2 + 1."""
    R = sorted(set(int(r) for r in R))
    ts = [abs(int(t)) for t in T]
    if not R or not ts:
        raise ValueError("R and T must be nonempty")
    check_base(s)
    t_max = max(ts)
    p = 1
    while True:
        if all(r ** (p - 1) >= 2 * t_max and r ** p >= s * s + 1 for r in R):
            return p
        p += 1


def majority_length_bound(R: Sequence[int], t_count: int, s_pow: tuple[int, int],
                          cfg: SchmidtConfig, t_max: Optional[int] = None) -> int:
    """Window length above which at least half of the restricted digit
    extensions pass the aggregate-sum threshold ell^(2 - c/4).

    Least integer greater than the certified upper brackets of
    (2^(2/c)+1) log S, (16 c~ #T #R)^(4/c), (8 p log S)^2 and max log r,
    where S is the working base (s^k).  The dominant term is astronomically
    large at realistic inputs; the value is report-only and rounding it up
    is safe because any larger window length also works.
    """
    s, k = s_pow
    check_base(s)
    S = s ** k
    R = sorted(set(int(r) for r in R))
    if not R or t_count < 1:
        raise ValueError("R and T must be nonempty")
    c = Fraction(cfg.c)
    c_tilde_hi = cosine_constant(Fraction(1, 10 ** 6)).upper
    p = schmidt_p(R, [t_max or t_count], S)  # only the largest |t| matters

    ctx = iv_context(192)
    log_s = ctx.log(S)
    terms = [
        (ctx.exp(ctx.log(2) * iv_from_fraction(ctx, Fraction(2) / c)) + 1) * log_s,
        ctx.exp(ctx.log(16 * iv_from_fraction(ctx, c_tilde_hi) * t_count * len(R))
                * iv_from_fraction(ctx, Fraction(4) / c)),
        (8 * p * log_s) ** 2,
        ctx.log(max(R)),
    ]
    hi = Fraction(0)
    for term in terms:
        _, t_hi = fraction_bounds(term)
        hi = max(hi, t_hi)
    return floor_fraction(hi) + 1


def restricted_alphabet_size(s: int, k: int = 1) -> int:
    """s^k - 1 when s is odd, s^k - 2 when s is even (an even alphabet)."""
    check_base(s)
    return s ** k - 1 if s % 2 == 1 else s ** k - 2


@dataclass
class SurveyResult:
    fraction: Fraction
    witnesses: list[DigitBlock]
    exhaustive: bool
    n_tested: int
    n_passed: int
    threshold: Fraction
    escalations: int = 0


def _sample_codes(space: int, count: int, seed: int) -> list[int]:
    rng = random.Random("survey:%d" % seed)
    if space <= count:
        return list(range(space))
    seen: set[int] = set()
    while len(seen) < count:
        seen.add(rng.randrange(space))
    return sorted(seen)


def candidate_survey(eta: AdicRational, s_pow: tuple[int, int], a: int, ell: int,
                     R: Sequence[int], T: Iterable[int], threshold: Fraction,
                     sample: Optional[int] = None, seed: int = 0,
                     max_witnesses: int = 100) -> SurveyResult:
    """Fraction of restricted-alphabet extensions eta_v whose aggregate sum
    A(eta_v, R, T, a, ell) stays below ``threshold``.

    Candidates are words v over the restricted alphabet, of length
    <a+ell;S> - <a;S> for S the working base, attached after eta's digits:
    eta_v = eta + S^(-<a;S>) * sum_j v_j S^(-j).  Enumeration is exhaustive
    unless the space exceeds ``sample``, in which case a seeded uniform
    sample is scored and the returned fraction is flagged as an estimate.
    Witnesses come back in lexicographic order.  Per-candidate threshold
    decisions are certified: the float path escalates to interval arithmetic
    whenever its enclosure straddles the threshold.
    """
    s, k = s_pow
    S = s ** k
    R = sorted(set(int(r) for r in R))
    ts = sorted(set(int(t) for t in T))
    for r in R:
        if minimal_representative(r) == minimal_representative(s):
            raise ValueError("survey base %d multiplicatively dependent on %d" % (s, r))
    alphabet = restricted_alphabet_size(s, k)
    threshold = Fraction(threshold)

    start = scaled_index0(a, S)
    if eta.precision != start or eta.base ** eta.power != S:
        raise ValueError("eta must be S-adic with precision <a;S>")
    n_digits = scaled_index(a + ell, S) - start
    space = alphabet ** n_digits
    if sample is not None and space > sample:
        codes = _sample_codes(space, sample, seed)
        exhaustive = False
    else:
        if space > 1 << 26:
            raise ValueError("candidate space %d too large; pass a sample budget" % space)
        codes = list(range(space))
        exhaustive = True

    eta_val = eta.value
    shift = Fraction(1, S ** start) if start else Fraction(1)
    tables = _phase_tables(eta_val, S, start, n_digits, R, ts, a, ell)
    # candidate-independent radius: |S_rt|^2 error <= 2 W e + e^2 per block,
    # plus relative slack for the numpy reductions
    rad_const = sum(2 * b.shape[0] * sum_term_error(b.shape[0])
                    + sum_term_error(b.shape[0]) ** 2 for b, _ in tables)

    total_w = sum(b.shape[0] for b, _ in tables)
    chunk = max(256, (1 << 22) // max(1, total_w))
    passed = 0
    escal = 0
    witnesses: list[DigitBlock] = []
    codes_arr = np.array(codes, dtype=np.int64)
    for lo in range(0, len(codes), chunk):
        batch = codes_arr[lo:lo + chunk]
        digit_mat = _codes_to_digits(batch, alphabet, n_digits)
        a_vals = np.zeros(len(batch))
        for beta, alpha in tables:
            phases = digit_mat @ alpha + beta[np.newaxis, :]
            angle = 2 * math.pi * phases
            a_vals += np.cos(angle).sum(axis=1) ** 2 + np.sin(angle).sum(axis=1) ** 2
        for i in range(len(batch)):
            verdict = _certified_pass(float(a_vals[i]), rad_const, threshold)
            if verdict is None:
                escal += 1
                digs = tuple(int(d) for d in digit_mat[i])
                nu = eta_val + shift * _tail_value(digs, S)
                verdict = exp_sum_A(nu, R, ts, a, ell,
                                    precision=Fraction(1, 10 ** 15)).compare(threshold) == -1
            if verdict:
                passed += 1
                if len(witnesses) < max_witnesses:
                    witnesses.append(DigitBlock(alphabet, tuple(int(d) for d in digit_mat[i])))
    return SurveyResult(Fraction(passed, len(codes)), witnesses, exhaustive,
                        len(codes), passed, threshold, escal)


def _tail_value(digits: Sequence[int], S: int) -> Fraction:
    num = 0
    for d in digits:
        num = num * S + d
    return Fraction(num, S ** len(digits)) if len(digits) else Fraction(0)


def _certified_pass(a_float: float, rad_const: float, threshold: Fraction) -> Optional[bool]:
    slack = Fraction(rad_const + 1e-12 * (a_float + 1.0))
    if Fraction(a_float) + slack < threshold:
        return True
    if Fraction(a_float) - slack >= threshold:
        return False
    return None


def _phase_tables(eta_val: Fraction, S: int, start: int, n_digits: int,
                  R: Sequence[int], ts: Sequence[int], a: int, ell: int):
    """Per (r, t): base phase vector beta[j] and digit phase matrix alpha[j, pos].

    Phases are linear in the digits: frac(r^j t eta_v) = frac(r^j t eta) +
    sum_pos v_pos frac(r^j t S^-(start+pos)) (mod 1), and e() is 1-periodic
    so the float sum never needs reducing.
    """
    tables = []
    for r in R:
        j0, j1 = window(a, ell, r)
        w = j1 - j0
        for t in ts:
            q_eta = eta_val.denominator
            beta = np.zeros(w)
            if q_eta > 1:
                num = eta_val.numerator * t % q_eta * pow(r, j0, q_eta) % q_eta
                for idx in range(w):
                    beta[idx] = float_fraction_ratio(num, q_eta)
                    num = num * r % q_eta
            alpha = np.empty((n_digits, w))
            for pos in range(1, n_digits + 1):
                mod = S ** (start + pos)
                nm = t % mod * pow(r, j0, mod) % mod
                for idx in range(w):
                    alpha[pos - 1, idx] = float_fraction_ratio(nm, mod)
                    nm = nm * r % mod
            tables.append((beta, alpha))
    return tables


def _codes_to_digits(codes: np.ndarray, alphabet: int, n_digits: int) -> np.ndarray:
    out = np.empty((len(codes), n_digits))
    rem = codes.copy()
    for pos in range(n_digits - 1, -1, -1):
        out[:, pos] = rem % alphabet
        rem //= alphabet
    return out
