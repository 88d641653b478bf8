"""Randomized and exhaustive property suites.

These are the executable checks behind the package's correctness story:
oracle equivalence for the discrepancy kernels, the partition and Weyl
threshold implications, the block-to-orbit transfer, the base-4 defect
enumeration, the candidate-majority survey, and adic refinement geometry.
Each suite returns a SuiteResult; the CLI maps failures to exit codes and
prints witnesses.

Trial sequences are exact rationals over a common denominator so that every
discrepancy computation stays in integer arithmetic.  Generators mix
uniform, stratified (near-equidistributed), and clustered shapes so the
implication suites exercise both hypothesis-true and hypothesis-false
trials.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .basechange import adic_subinterval, nested_refinement, padding
from .counting import base4_defect_survey
from .discrepancy import (
    extreme_discrepancy,
    extreme_discrepancy_bruteforce,
    extreme_discrepancy_pairscan,
    family_discrepancy,
    equipartition,
    partition_bound,
    star_discrepancy,
)
from .expsums import candidate_survey, leveque_parameters, weyl_power
from .numerics import AdicRational, DigitBlock, Interval, fractional_orbit, scaled_index

__all__ = [
    "SuiteResult",
    "discrepancy_oracle_suite",
    "partition_suite",
    "weyl_threshold_suite",
    "block_transfer_suite",
    "base4_defect_suite",
    "candidate_majority_suite",
    "refinement_suite",
    "SUITES",
]


@dataclass
class SuiteResult:
    name: str
    trials: int
    failures: int
    hypothesis_hits: int = 0
    witnesses: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def summary(self) -> str:
        status = "pass" if self.passed else "FAIL"
        extras = " ".join(self.notes)
        return ("%s: %s (%d trials, %d failures, %d hypothesis hits)%s"
                % (self.name, status, self.trials, self.failures, self.hypothesis_hits,
                   (" " + extras) if extras else ""))


def _record_failure(res: SuiteResult, witness: str, cap: int = 10) -> None:
    res.failures += 1
    if len(res.witnesses) < cap:
        res.witnesses.append(witness)


# ---------------------------------------------------------------------------
# exact integer-grid discrepancy helpers (common denominator q)


def _star_extreme_ints(nums: np.ndarray, q: int) -> tuple[Fraction, Fraction]:
    """(star, extreme) of points nums/q, exact via the sorted closed form."""
    xs = np.sort(nums)
    n = len(xs)
    i1 = np.arange(1, n + 1, dtype=np.int64)
    above = int((i1 * q - n * xs).max())
    below = int((n * xs - (i1 - 1) * q).max())
    above = max(above, 0)
    below = max(below, 0)
    return (Fraction(max(above, below), n * q), Fraction(above + below, n * q))


def _bruteforce_extreme_ints(nums: np.ndarray, q: int) -> Fraction:
    """Endpoint enumeration with one-sided limits, exact over the int grid."""
    xs = np.sort(nums)
    n = len(xs)
    values = np.unique(np.concatenate([xs, [0, q]]))
    c_lt = np.searchsorted(xs, values, side="left").astype(np.int64)
    c_le = np.searchsorted(xs, values, side="right").astype(np.int64)
    lengths = n * (values[np.newaxis, :] - values[:, np.newaxis])  # b - a on the upper triangle
    best = 0  # units of 1/(n*q)
    for ca, cb in ((c_lt, c_lt), (c_lt, c_le), (c_le, c_lt), (c_le, c_le)):
        counts = cb[np.newaxis, :] - ca[:, np.newaxis]
        dev = np.triu(np.abs(counts * q - lengths))
        best = max(best, int(dev.max()))
    return Fraction(best, n * q)


def _random_nums(rng: random.Random, n: int, q: int, shape: str) -> list[int]:
    if shape == "uniform":
        return [rng.randrange(q) for _ in range(n)]
    if shape == "stratified":
        # one point near each equispaced slot, small jitter
        out = []
        for i in range(n):
            center = (i * q) // n
            jitter = rng.randrange(-q // (4 * n) or 1, q // (4 * n) + 1)
            out.append(min(max(center + jitter, 0), q - 1))
        return out
    if shape == "clustered":
        c = rng.randrange(q)
        w = max(q // 50, 1)
        return [(c + rng.randrange(w)) % q for _ in range(n)]
    raise ValueError(shape)


_SHAPES = ("uniform", "stratified", "clustered")


def discrepancy_oracle_suite(n_random: int = 1000, n_max: int = 200,
                             grid_points: int = 12, grid_n_max: int = 6,
                             seed: int = 0) -> SuiteResult:
    """Closed-form extreme discrepancy equals brute-force endpoint
    enumeration: random rational sequences plus the exhaustive small grid."""
    res = SuiteResult("discrepancy-oracle", 0, 0)
    rng = random.Random("oracle:%d" % seed)
    q = 55440
    for i in range(n_random):
        n = rng.randrange(1, n_max + 1)
        nums = np.array(_random_nums(rng, n, q, _SHAPES[i % 3]), dtype=np.int64)
        star, extreme = _star_extreme_ints(nums, q)
        brute = _bruteforce_extreme_ints(nums, q)
        res.trials += 1
        if extreme != brute:
            _record_failure(res, "random trial %d: closed=%s brute=%s" % (i, extreme, brute))
        if not (star <= extreme <= 2 * star):
            _record_failure(res, "random trial %d: star/extreme envelope broken" % i)
    # exhaustive: every sequence over the fixed grid, N <= grid_n_max
    for n in range(1, grid_n_max + 1):
        total = grid_points ** n
        codes = np.arange(total, dtype=np.int64)
        cols = []
        c = codes.copy()
        for _ in range(n):
            cols.append(c % grid_points)
            c //= grid_points
        pts = np.stack(cols, axis=1)  # values in 0..grid_points-1, denominator = grid_points
        xs = np.sort(pts, axis=1)
        i1 = np.arange(1, n + 1, dtype=np.int64)
        above = np.maximum((i1 * grid_points - n * xs).max(axis=1), 0)
        below = np.maximum((n * xs - (i1 - 1) * grid_points).max(axis=1), 0)
        closed = above + below  # units of 1/(n*grid_points)
        brute = _grid_bruteforce(xs, grid_points)
        res.trials += total
        bad = np.nonzero(closed != brute)[0]
        for idx in bad[:5]:
            _record_failure(res, "grid N=%d seq=%s closed=%s brute=%s"
                            % (n, pts[idx].tolist(), closed[idx], brute[idx]))
        res.failures += max(len(bad) - 5, 0)
    return res


def _grid_bruteforce(xs_sorted: np.ndarray, q: int) -> np.ndarray:
    """Vectorized endpoint-enumeration oracle over all rows (units 1/(n q))."""
    total, n = xs_sorted.shape
    best = np.zeros(total, dtype=np.int32)
    c_lt = np.empty((total, q + 1), dtype=np.int8)
    c_le = np.empty((total, q + 1), dtype=np.int8)
    for v in range(q + 1):
        c_lt[:, v] = (xs_sorted < v).sum(axis=1, dtype=np.int8)
        c_le[:, v] = (xs_sorted <= v).sum(axis=1, dtype=np.int8)
    for ia in range(q + 1):
        for ib in range(ia, q + 1):
            length_scaled = n * (ib - ia)
            for ca, cb in ((c_lt, c_lt), (c_lt, c_le), (c_le, c_lt), (c_le, c_le)):
                v = np.abs((cb[:, ib].astype(np.int32) - ca[:, ia]) * q - length_scaled)
                np.maximum(best, v, out=best)
    return best


def partition_suite(trials: int = 10 ** 4, eps_list: Sequence[Fraction] = (),
                    seed: int = 0) -> SuiteResult:
    """Zero counterexamples to: family discrepancy over the ceil(3/eps)
    cells below (eps/3)^2 forces extreme discrepancy below eps."""
    eps_list = [Fraction(e) for e in (eps_list or (Fraction(1, 2), Fraction(1, 3), Fraction(1, 5)))]
    res = SuiteResult("partition-implication", 0, 0)
    rng = random.Random("partition:%d" % seed)
    q = 55440
    per_eps = trials // len(eps_list)
    for eps in eps_list:
        ncells = -((-3 * eps.denominator) // eps.numerator)
        cell_scaled = q // ncells if q % ncells == 0 else None
        for i in range(per_eps):
            n = rng.randrange(max(8, ncells), 400)
            nums = np.array(_random_nums(rng, n, q, _SHAPES[i % 3]), dtype=np.int64)
            res.trials += 1
            # family discrepancy over the equal cells, exact
            if cell_scaled:
                counts = np.bincount(nums // cell_scaled, minlength=ncells)
                fam = max(abs(Fraction(int(c), n) - Fraction(1, ncells)) for c in counts)
            else:
                fam = family_discrepancy(equipartition(ncells),
                                         [Fraction(int(x), q) for x in nums])
            if fam < (eps / 3) ** 2:
                res.hypothesis_hits += 1
                _, extreme = _star_extreme_ints(nums, q)
                if not extreme < eps:
                    _record_failure(res, "eps=%s n=%d fam=%s extreme=%s" % (eps, n, fam, extreme))
    if res.hypothesis_hits == 0:
        res.notes.append("warning: no trial satisfied the hypothesis")
    return res


def weyl_threshold_suite(trials: int = 1000, eps_list: Sequence[Fraction] = (),
                         seed: int = 0) -> SuiteResult:
    """Zero counterexamples to the frequency-threshold implication: all
    normalized Weyl powers below delta on T forces discrepancy below eps,
    with every enclosure decisive."""
    eps_list = [Fraction(e) for e in (eps_list or (Fraction(1, 2), Fraction(1, 3)))]
    res = SuiteResult("weyl-threshold", 0, 0)
    rng = random.Random("weyl:%d" % seed)
    q = 55440
    per_eps = trials // len(eps_list)
    for eps in eps_list:
        lp = leveque_parameters(eps)
        for i in range(per_eps):
            n = rng.randrange(32, 201)
            nums = _random_nums(rng, n, q, _SHAPES[i % 3])
            seq = [Fraction(x, q) for x in nums]
            res.trials += 1
            all_below = True
            for t in lp.T:
                enc = weyl_power(seq, t)
                verdict = enc.compare(lp.delta)
                if verdict is None:
                    enc = weyl_power(seq, t, precision=Fraction(1, 10 ** 15))
                    verdict = enc.compare(lp.delta)
                if verdict is None:
                    _record_failure(res, "indecisive enclosure eps=%s t=%d" % (eps, t))
                    all_below = False
                    break
                if verdict == 1:
                    all_below = False
                    break
            if all_below:
                res.hypothesis_hits += 1
                _, extreme = _star_extreme_ints(np.array(nums, dtype=np.int64), q)
                if not extreme < eps:
                    _record_failure(res, "eps=%s n=%d extreme=%s" % (eps, n, extreme))
    if res.hypothesis_hits == 0:
        res.notes.append("warning: no trial satisfied the hypothesis")
    return res


def block_transfer_suite(samples: int = 10 ** 5, eps: Fraction = Fraction(1, 2),
                         seed: int = 0) -> SuiteResult:
    """Zero counterexamples to the discrete-to-orbit transfer at the minimal
    valid (ell, N) for base 2: C(ell, w) < eps^2/18 forces the orbit of the
    word value below eps in extreme discrepancy."""
    eps = Fraction(eps)
    s = 2
    ell = 1
    while s ** ell * eps <= 3:
        ell += 1
    n = int(2 * ell * Fraction(9) / eps ** 2) + 1
    res = SuiteResult("block-transfer", 0, 0)
    res.notes.append("ell=%d N=%d" % (ell, n))
    rng = np.random.default_rng(seed)
    words = rng.integers(0, 2, size=(samples, n), dtype=np.int8)
    codes = np.zeros((samples, n - ell + 1), dtype=np.int16)
    for o in range(ell):
        codes = codes * 2 + words[:, o:o + n - ell + 1]
    bound_num = eps.numerator ** 2
    bound_den = eps.denominator ** 2 * 18
    ok = np.ones(samples, dtype=bool)
    for code in range(2 ** ell):
        cnt = (codes == code).sum(axis=1)
        # |cnt/n - 2^-ell| < eps^2/18
        ok &= np.abs(cnt.astype(np.int64) * 2 ** ell - n) * bound_den < bound_num * n * 2 ** ell
    res.trials = samples
    res.hypothesis_hits = int(ok.sum())
    for idx in np.nonzero(ok)[0]:
        row = words[idx]
        num = 0
        for d in row:
            num = (num << 1) | int(d)
        d_val = _word_orbit_extreme(num, n)
        if not d_val < eps:
            _record_failure(res, "word %d has orbit discrepancy %s" % (idx, d_val))
    if res.hypothesis_hits == 0:
        res.notes.append("warning: no sampled word satisfied the hypothesis")
    return res


def _word_orbit_extreme(num: int, n: int) -> Fraction:
    den = 1 << n
    pts = []
    for _ in range(n):
        pts.append(Fraction(num, den))
        den >>= 1
        num &= den - 1
    return extreme_discrepancy(pts)


def base4_defect_suite(n_values: Sequence[int] = (2, 8, 10, 12, 14, 16),
                       oracle_max: int = 10) -> SuiteResult:
    """Exact defect-survey counts, cross-checked against rational orbits for
    small lengths; records the fractions for trend reporting."""
    res = SuiteResult("base4-defect", 0, 0)
    fractions = {}
    for n in n_values:
        count, frac = base4_defect_survey(n)
        fractions[n] = frac
        res.trials += 1
        if n <= oracle_max:
            brute = 0
            for bits in itertools.product((0, 1), repeat=n):
                eta = sum(Fraction(b, 4 ** (i + 1)) for i, b in enumerate(bits))
                orbit = fractional_orbit(eta, 2, 0, 2 * n)
                inside = sum(1 for x in orbit if x < Fraction(1, 2))
                if Fraction(inside, 2 * n) >= Fraction(5, 8):
                    brute += 1
            res.hypothesis_hits += 1
            if brute != count:
                _record_failure(res, "n=%d closed=%d brute=%d" % (n, count, brute))
    res.notes.append("fractions: " + ", ".join("%d: %s" % (n, fractions[n]) for n in n_values))
    return res


def candidate_majority_suite(R: Sequence[int] = (2,), s: int = 3, ell: int = 12,
                             a: int = 0, t_set: Sequence[int] = (1,),
                             sample: Optional[int] = None, seed: int = 0) -> SuiteResult:
    """The desk acceptance threshold admits at least half of the restricted
    extensions (exhaustive when the space allows)."""
    lp = leveque_parameters(Fraction(1))
    threshold = lp.delta * scaled_index(ell, max(R)) ** 2
    eta = AdicRational(s, 1, ())
    if a != 0:
        raise ValueError("suite fixes a=0 (an empty working prefix)")
    survey = candidate_survey(eta, (s, 1), a, ell, list(R), list(t_set), threshold,
                              sample=sample, seed=seed)
    res = SuiteResult("candidate-majority", survey.n_tested, 0)
    res.hypothesis_hits = survey.n_passed
    res.notes.append("fraction=%s threshold=%.6g exhaustive=%s"
                     % (survey.fraction, float(threshold), survey.exhaustive))
    if survey.fraction < Fraction(1, 2):
        _record_failure(res, "passing fraction %s below 1/2" % survey.fraction)
    return res


def refinement_suite(trials: int = 10 ** 4, seed: int = 0) -> SuiteResult:
    """Containment and length guarantees of the adic refinement helpers,
    plus the padding bound on scaled-index jumps across base changes."""
    res = SuiteResult("refinement", 0, 0)
    rng = random.Random("refine:%d" % seed)
    bases = (2, 3, 4, 5, 10)
    for i in range(trials):
        s = bases[i % len(bases)]
        q = rng.randrange(2, 5000)
        a = rng.randrange(0, q - 1)
        b = rng.randrange(a + 1, q)
        interval = Interval(Fraction(a, q), Fraction(b, q))
        res.trials += 1
        sub = adic_subinterval(interval, s)
        if not (interval.lower <= sub.lower and sub.upper <= interval.upper):
            _record_failure(res, "containment: %s in %s base %d" % (sub, interval, s))
        if not sub.measure >= interval.measure / (2 * s):
            _record_failure(res, "length: %s in %s base %d" % (sub, interval, s))
    rng2 = random.Random("pad:%d" % seed)
    for _ in range(1000):
        r = bases[rng2.randrange(len(bases))]
        s0 = bases[rng2.randrange(len(bases))]
        s1 = bases[rng2.randrange(len(bases))]
        b = rng2.randrange(1, 2000)
        a = b + (padding(s0, s1) // 2)
        res.trials += 1
        if scaled_index(a, r) - scaled_index(b, r) > padding(s0, s1):
            _record_failure(res, "padding bound broken r=%d s0=%d s1=%d b=%d" % (r, s0, s1, b))
    return res


SUITES = {
    "discrepancy-oracle": discrepancy_oracle_suite,
    "partition": partition_suite,
    "weyl-threshold": weyl_threshold_suite,
    "block-transfer": block_transfer_suite,
    "base4-defect": base4_defect_suite,
    "candidate-majority": candidate_majority_suite,
    "refinement": refinement_suite,
}
