"""Combinatorial counting of good digit blocks.

Provides exhaustive block-counting oracles, certified tail-bound thresholds
for how long a word must be before almost all words have small discrete
discrepancy, the base-4/base-2 defect survey, and the restricted-alphabet
parameter pipeline (with the digit-expansion map w -> w*).

Thresholds come from a Hoeffding bound on overlapping block counts: the
window positions split into ell interleaved streams of independent
indicators, each stream concentrates exponentially, and a union bound over
the s^ell block values and the streams finishes the estimate.  Exhaustive
verification at small lengths is cross-checked in the test suite.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .discrepancy import extreme_discrepancy
from .enclosure import MAX_PREC, ceil_fraction, fraction_bounds, iv_context, iv_from_fraction
from .numerics import DigitBlock, check_base

__all__ = [
    "RestrictedAlphabet",
    "BudgetError",
    "ENUMERATION_BUDGET",
    "good_block_count",
    "block_count_threshold",
    "base4_defect_survey",
    "base4_defect_threshold",
    "expand_block",
    "restricted_alphabet_params",
    "restricted_alphabet_survey",
]

ENUMERATION_BUDGET = 1 << 24


class BudgetError(ValueError):
    """Exhaustive enumeration would exceed the configured budget."""


@dataclass(frozen=True)
class RestrictedAlphabet:
    """Digit alphabet {0, ..., s_tilde - 1} inside base s^k.

    s_tilde is s^k - 1 or s^k - 2; dropping the top digit value(s) creates
    the deliberate non-uniformity the denial stages rely on while keeping
    the candidate space large.
    """

    s: int
    k: int
    s_tilde: int

    def __post_init__(self):
        check_base(self.s)
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.s_tilde not in (self.s ** self.k - 1, self.s ** self.k - 2):
            raise ValueError("s_tilde must be s^k - 1 or s^k - 2")
        if not 2 <= self.s_tilde < self.s ** self.k:
            raise ValueError("alphabet too small")


def _ceil_frac(q: Fraction) -> int:
    return -((-q.numerator) // q.denominator)


def good_block_count(s: int, ell: int, eps: Fraction, n: int,
                     budget: int = ENUMERATION_BUDGET) -> int:
    """Exact number of words v of length n over base s with C(ell, v) < eps.

    Exhaustive enumeration; spaces beyond the budget are refused (use
    block_count_threshold for certified statements at large n).
    """
    check_base(s)
    eps = Fraction(eps)
    if ell < 1 or ell > n:
        raise ValueError("need 1 <= ell <= n")
    space = s ** n
    n_codes = s ** ell
    n_windows = n - ell + 1
    if space > budget or space * n_windows > 1 << 28:
        raise BudgetError("s^n = %d exceeds the budget; use block_count_threshold" % space)

    words = np.arange(space, dtype=np.int64)
    windows = np.empty((space, n_windows), dtype=np.int64)
    for i in range(n_windows):
        windows[:, i] = (words // (s ** (n - ell - i))) % n_codes
    ok = np.ones(space, dtype=bool)
    # |c/n - s^-ell| < eps  <=>  |c * s^ell - n| * eps_den < eps_num * n * s^ell
    bound_lhs_scale = eps.denominator
    bound_rhs = eps.numerator * n * n_codes
    for code in range(n_codes):
        cnt = (windows == code).sum(axis=1)
        dev = np.abs(cnt * n_codes - n)
        ok &= dev * bound_lhs_scale < bound_rhs
    return int(ok.sum())


def block_count_threshold(s: int, ell: int, eps: Fraction, delta: Fraction,
                          method: str = "tail") -> int:
    """Certified N0: for all N >= N0, the fraction of words v of length N
    over base s with C(ell, v) >= eps is below delta.

    ``tail`` derives N0 from the Hoeffding/union estimate (a proof);
    ``empirical`` doubles N until exhaustive counts pass at two consecutive
    sizes (a calibration, not a proof -- callers must report which was used).
    """
    check_base(s)
    eps, delta = Fraction(eps), Fraction(delta)
    if not (0 < eps and 0 < delta):
        raise ValueError("eps and delta must be positive")
    if ell < 1:
        raise ValueError("ell must be >= 1")
    if method == "empirical":
        return _block_count_threshold_empirical(s, ell, eps, delta)
    if method != "tail":
        raise ValueError("unknown method %r" % method)
    n_codes = s ** ell
    # guard: q*ell/N <= eps/2 with q = s^-ell, so each stream deviation
    # budget is at least eps/2
    n_guard = _ceil_frac(Fraction(2 * ell, eps * n_codes))
    # per-stream Hoeffding with t >= eps/2: need 2 ell s^ell exp(-eps^2 n/2) < delta,
    # i.e. n > (2/eps^2) log(2 ell s^ell / delta)
    ratio = Fraction(2 * ell * n_codes) / delta
    if ratio <= 1:
        n_hat = 0
    else:
        prec = 80
        ctx = iv_context(prec)
        _, hi = fraction_bounds(ctx.log(iv_from_fraction(ctx, ratio))
                                * iv_from_fraction(ctx, 2 / eps ** 2))
        n_hat = max(ceil_fraction(hi), 0)
    return max(n_guard, ell * (n_hat + 1), ell)


def _block_count_threshold_empirical(s: int, ell: int, eps: Fraction, delta: Fraction) -> int:
    n = max(2 * ell, 4)
    while s ** (2 * n) <= ENUMERATION_BUDGET:
        good_n = good_block_count(s, ell, eps, n)
        good_2n = good_block_count(s, ell, eps, 2 * n)
        if (Fraction(s ** n - good_n, s ** n) < delta
                and Fraction(s ** (2 * n) - good_2n, s ** (2 * n)) < delta):
            return n
        n *= 2
    raise BudgetError("empirical calibration ran out of enumeration budget")


def base4_defect_survey(n: int, budget: int = ENUMERATION_BUDGET) -> tuple[int, Fraction]:
    """Exact count and fraction of binary words v of length n whose base-4
    reading eta_v = sum v_j 4^-j has at least 5/8 of its first 2n doubling
    orbit points in [0, 1/2).

    The orbit point {2^m eta_v} lies in [0,1/2) exactly when binary digit
    m+1 of eta_v is 0, and the binary expansion of eta_v interleaves zeros
    with the word bits, so the condition reduces to popcount(v) <= 3n/4.
    The test suite cross-checks this digit-reading shortcut against exact
    rational orbits.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if 2 ** n > budget:
        raise BudgetError("2^n exceeds the enumeration budget")
    limit = (3 * n) // 4  # zeros among 2n bits >= (5/8)(2n)  <=>  popcount <= 3n/4
    count = sum(math.comb(n, i) for i in range(0, limit + 1))
    return count, Fraction(count, 2 ** n)


def base4_defect_threshold(eps: Fraction) -> int:
    """N0 above which the passing fraction of base4_defect_survey exceeds
    1 - eps; reduction to block_count_threshold with tolerance 1/12."""
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise ValueError("need 0 < eps < 1")
    return block_count_threshold(2, 1, Fraction(1, 12), eps)


def expand_block(w: DigitBlock, s: int, k: int) -> DigitBlock:
    """Base-s digit string of length k*|w| with the same adic value as w
    read in base s^k (each digit rendered as k base-s digits)."""
    check_base(s)
    if k < 1:
        raise ValueError("k must be >= 1")
    if w.base != s ** k:
        raise ValueError("w is not over the alphabet of size s^k")
    out = []
    for d in w.digits:
        part = []
        for _ in range(k):
            d, r = divmod(d, s)
            part.append(r)
        out.extend(reversed(part))
    return DigitBlock(s, tuple(out))


def restricted_alphabet_params(s: int, eps: Fraction,
                               parity_choice: str = "even") -> tuple[int, int, RestrictedAlphabet]:
    """(k, N0, alphabet) such that for all N >= N0, more than half of the
    words w over the restricted alphabet of length N satisfy
    D({s^j eta_w} : 0 <= j < kN) < eps.

    parity_choice picks which of s^k - 1, s^k - 2 to use ("even" selects the
    even one, which the aggregate-sum surveys require).

    Parameter chain: with E = eps^2/18 and ell minimal with s^ell > 3/eps,
    a word w whose single-digit frequencies sit within delta_w of uniform
    expands to w* with C(ell, w*) < 4 s^-k + delta_w s^(k-ell) + ell/k (count
    block occurrences across all allowed alphabet values exactly; junction
    windows contribute the ell/k term).  Choosing k with s^k >= 12/E and
    k >= 3 ell / E, and delta_w = (E/3) s^(ell-k), brings this under E; the
    block-count threshold at tolerance delta_w and bad fraction 1/2 then
    gives N0, joined with kN > 2 ell (3/eps)^2 which the transfer from
    discrete to orbit discrepancy needs.
    """
    check_base(s)
    eps = Fraction(eps)
    if not 0 < eps <= 1:
        raise ValueError("need 0 < eps <= 1")
    big_e = eps ** 2 / 18
    ell = 1
    while s ** ell * eps <= 3:
        ell += 1
    k = 1
    while not (s ** k >= 4 and Fraction(12, s ** k) <= big_e and Fraction(3 * ell, k) <= big_e):
        k += 1
    alphabet = _pick_alphabet(s, k, parity_choice)
    delta_w = big_e / 3 * Fraction(s ** ell, s ** k)
    n0 = max(
        block_count_threshold(alphabet.s_tilde, 1, delta_w, Fraction(1, 2)),
        _ceil_frac(Fraction(2 * ell * 9, eps ** 2 * k)) + 1,
        1,
    )
    return k, n0, alphabet


def _pick_alphabet(s: int, k: int, parity_choice: str) -> RestrictedAlphabet:
    cand1, cand2 = s ** k - 1, s ** k - 2
    if parity_choice == "even":
        st = cand1 if cand1 % 2 == 0 else cand2
    elif parity_choice == "odd":
        st = cand1 if cand1 % 2 == 1 else cand2
    else:
        raise ValueError("parity_choice must be 'odd' or 'even'")
    return RestrictedAlphabet(s, k, st)


def restricted_alphabet_survey(s: int, k: int, alphabet: RestrictedAlphabet, n: int,
                               eps: Fraction, sample: Optional[int] = None,
                               seed: int = 0) -> tuple[Fraction, bool]:
    """Fraction of words w over the restricted alphabet of length n whose
    orbit {s^j eta_w}, 0 <= j < kn, has extreme discrepancy below eps.

    Exhaustive when the space fits (deterministic and seed-independent);
    otherwise a seeded uniform sample.  Discrepancies are exact rationals.
    """
    check_base(s)
    eps = Fraction(eps)
    st = alphabet.s_tilde
    space = st ** n
    if sample is not None and space > sample:
        rng = random.Random("alphabet-survey:%d" % seed)
        chosen: set[int] = set()
        while len(chosen) < sample:
            chosen.add(rng.randrange(space))
        codes = sorted(chosen)
        exhaustive = False
    else:
        if space > ENUMERATION_BUDGET:
            raise BudgetError("alphabet space too large; pass a sample budget")
        codes = range(space)
        exhaustive = True
    base_pow = s ** k
    hits = 0
    total = 0
    for code in codes:
        digits = []
        c = code
        for _ in range(n):
            c, r = divmod(c, st)
            digits.append(r)
        digits.reverse()
        word = expand_block(DigitBlock(base_pow, tuple(digits)), s, k)
        if orbit_discrepancy_of_word(word) < eps:
            hits += 1
        total += 1
    return Fraction(hits, total), exhaustive


def orbit_discrepancy_of_word(word: DigitBlock) -> Fraction:
    """Extreme discrepancy of {base^j eta_w} for 0 <= j < |w|, exactly.

    The j-th orbit point is the value of the digit suffix starting at j+1.
    """
    s = word.base
    n = len(word.digits)
    if n == 0:
        raise ValueError("empty word")
    num = 0
    for d in word.digits:
        num = num * s + d
    pts = []
    den = s ** n
    for _ in range(n):
        pts.append(Fraction(num, den))
        den //= s
        num %= den
    return extreme_discrepancy(pts)
