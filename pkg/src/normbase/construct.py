"""Stage machines producing nested-interval digit expansions.

Three iterative constructions, each extending an exact adic rational one
stage at a time inside the previous stage's interval:

* ``run_selective``  -- normality to a base switched on or off by a
  three-quantifier predicate monitored during the run.
* ``run_slow_base``  -- absolutely normal output whose discrepancy in one
  chosen base decays arbitrarily slowly (above a caller schedule g), all
  other bases dominated by a single trace f.
* ``run_denial``     -- normal to every base in R while denying simple
  normality to every base in S, via restricted digit alphabets.

Faithful mode evaluates every length budget from the certified formulas;
these are astronomically large at realistic inputs, so faithful runs stop
with a budget error that reports the offending value.  Desk mode replaces
the formula budgets with schedule caps and verifies each existence claim
directly on the sampled candidate set, recording what was capped.  Runs are
deterministic: identical schedules (same seed) give identical stage
sequences, byte for byte in the run file.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .basechange import AdicInterval, leftmost_cell_index, nested_refinement_offset, padding
from .counting import restricted_alphabet_params
from .discrepancy import transfer_length_bound
from .enclosure import PrecisionError, certified_strict_floor_plus_one, float_fraction_ratio, sum_term_error
from .expsums import (
    LevequeParams,
    SchmidtConfig,
    exp_sum_A,
    leveque_parameters,
    majority_length_bound,
    schmidt_p,
    window,
)
from .numerics import (
    DigitBlock,
    check_base,
    digits_of_fraction,
    minimal_representative,
    is_minimal_representative,
    repeating_enumeration_list,
    repeating_enumeration_m,
    scaled_index,
    scaled_index0,
)

__all__ = [
    "Schedule",
    "StageState",
    "ConstructedReal",
    "RunReport",
    "PredicateOracle",
    "ORACLE_TRUE",
    "ORACLE_Z_LT_Y",
    "DeskAssertionError",
    "OracleBudgetError",
    "FaithfulBudgetError",
    "ell_budget",
    "run_selective",
    "run_slow_base",
    "run_denial",
    "g_log2",
]


class DeskAssertionError(RuntimeError):
    """A candidate-existence claim failed on the sampled set (desk mode)."""

    def __init__(self, claim: str, stage: int, detail: str = ""):
        self.claim = claim
        self.stage = stage
        super().__init__("stage %d: %s claim failed%s"
                         % (stage, claim, (": " + detail) if detail else ""))


class OracleBudgetError(RuntimeError):
    """The predicate oracle exceeded its per-run call budget."""


class FaithfulBudgetError(RuntimeError):
    """A faithful-mode bound exceeds any executable size (value attached)."""

    def __init__(self, what: str, value):
        self.what = what
        self.value = value
        super().__init__("faithful %s = %s exceeds the execution budget (report-only)"
                         % (what, value))


@dataclass(frozen=True)
class Schedule:
    """Faithful-versus-desk policy for a run.

    Faithful mode takes every length budget from the certified formulas and
    refuses caps; desk mode substitutes the caps below and turns each
    existence claim into a runtime assertion over the sampled candidates.
    """

    mode: str = "desk"
    cap_ell: int = 256
    cap_k: int = 3
    candidates: int = 48
    candidate_rounds: int = 3
    eps_a_floor: Fraction = Fraction(1)
    seed: int = 0
    schmidt: SchmidtConfig = field(default_factory=SchmidtConfig)
    strict_claims: bool = False
    oracle_budget: int = 1_000_000
    faithful_ell_limit: int = 1 << 20
    faithful_t_limit: int = 256

    def __post_init__(self):
        if self.mode not in ("desk", "faithful"):
            raise ValueError("mode must be 'desk' or 'faithful'")
        if self.mode == "desk" and self.cap_ell < 8:
            raise ValueError("cap_ell must be >= 8 in desk mode")
        object.__setattr__(self, "eps_a_floor", Fraction(self.eps_a_floor))

    def rng(self, *tag) -> random.Random:
        return random.Random("%s:%s" % (self.seed, ":".join(str(t) for t in tag)))


@dataclass(frozen=True)
class PredicateOracle:
    """Total decision procedure theta(x, y, z) over the naturals.

    Totality is the caller's obligation; a per-run call budget converts a
    runaway oracle into a distinct error instead of a hang.
    """

    evaluator: Callable[[int, int, int], bool]
    description: str = ""


ORACLE_TRUE = PredicateOracle(lambda x, y, z: True, "constant true")
ORACLE_Z_LT_Y = PredicateOracle(lambda x, y, z: z < y, "z < y")


@dataclass(frozen=True)
class StageState:
    """Full variable tuple of one construction stage."""

    index: int
    clause: str
    s: int
    k: int
    eps: Fraction
    b: int
    ell: int
    c: Optional[int]
    x: Optional[int]
    k_bar: Optional[int]
    R: tuple[int, ...]
    a: int
    block: tuple[int, ...]
    lo: Fraction
    hi: Fraction
    info: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def radix(self) -> int:
        return self.s ** self.k


@dataclass
class RunReport:
    kind: str
    mode: str
    lines: list[str] = field(default_factory=list)

    def add(self, msg: str):
        self.lines.append(msg)

    def text(self) -> str:
        return "\n".join(["run report (%s, %s mode)" % (self.kind, self.mode)] + self.lines)


@dataclass
class ConstructedReal:
    """Append-only stage list plus the current enclosing adic interval."""

    kind: str
    stages: list[StageState] = field(default_factory=list)
    value: Fraction = Fraction(0)
    width: Fraction = Fraction(1)

    @property
    def interval(self) -> tuple[Fraction, Fraction]:
        return self.value, self.value + self.width

    def render_digits(self, b: int, n_digits: int) -> tuple[DigitBlock, int]:
        """First n_digits base-b digits shared by every point of the current
        interval, plus the count of digits the interval does not determine
        yet (run more stages to shrink it)."""
        check_base(b)
        lo, hi = self.interval
        p_lo, q_lo = lo.numerator, lo.denominator
        p_hi, q_hi = hi.numerator, hi.denominator
        digits: list[int] = []
        for _ in range(n_digits):
            p_lo *= b
            d_lo, p_lo = divmod(p_lo, q_lo)
            p_hi *= b
            d_hi, p_hi = divmod(p_hi, q_hi)
            if p_hi == 0:
                d_hi -= 1  # hi is excluded; an exact grid hit belongs left
                p_hi = q_hi
            if d_lo != d_hi:
                break
            digits.append(d_lo)
        return DigitBlock(b, tuple(digits)), n_digits - len(digits)


def g_log2(n: int) -> Fraction:
    """Slow target schedule 1 / (2 ceil(log2(n + 2)))."""
    return Fraction(1, 2 * max(1, (n + 1).bit_length()))


# --------------------------------------------------------------------------
# shared stage helpers


def ell_budget(R: Sequence[int], s: int, k: int, eps: Fraction, cfg: SchmidtConfig) -> int:
    """Faithful extension-length budget: least integer above the window
    transfer bounds for all r in R, the restricted-alphabet word threshold,
    the survey majority length for the working base, and the Weyl-threshold
    power term ((log r)^2 / delta)^(4/c).  Report-only at realistic inputs.
    """
    eps = Fraction(eps)
    lp = leveque_parameters(_clamp_eps((eps / 10) ** 4))
    terms: list[int] = [1]
    for r in R:
        terms.append(transfer_length_bound(r, eps)[0])
    # word-count threshold for the restricted alphabet; the certified chain
    # fixes its own least depth, which the stage machines also use
    _, n0, _ = restricted_alphabet_params(s, eps)
    terms.append(n0)
    if R:
        terms.append(majority_length_bound(sorted(R), lp.m, (s, k), cfg, t_max=lp.m))
        c = Fraction(cfg.c)
        inv_delta = 1 / lp.delta
        for r in R:
            terms.append(certified_strict_floor_plus_one(
                lambda ctx, _r=r: ctx.exp(
                    ctx.log((ctx.log(_r) ** 2) * _iv_fr(ctx, inv_delta))
                    * _iv_fr(ctx, Fraction(4) / c))))
    return max(terms)


def _iv_fr(ctx, q: Fraction):
    return ctx.mpf(int(q.numerator)) / int(q.denominator)


def _clamp_eps(eps: Fraction) -> Fraction:
    return min(Fraction(eps), Fraction(1))


def _stage_weyl(eps: Fraction, sched: Schedule) -> tuple[LevequeParams, bool]:
    """(T, delta) for a stage's acceptance test; desk mode floors the input."""
    target = _clamp_eps((Fraction(eps) / 10) ** 4)
    if sched.mode == "desk" and target < sched.eps_a_floor:
        return leveque_parameters(sched.eps_a_floor), True
    lp = leveque_parameters(target)
    if lp.m > sched.faithful_t_limit:
        raise FaithfulBudgetError("frequency set size #T", lp.m)
    return lp, False


def _minimal_nat_for_depth(depth: int, s: int) -> int:
    """Least a >= 1 with <a;s> >= depth (a = 0 when depth is 0)."""
    if depth <= 0:
        return 0
    lo, hi = 1, max(1, int(math.ceil(depth * math.log(s))) + 2)
    while scaled_index(hi, s) < depth:
        hi *= 2
    while lo < hi:
        mid = (lo + hi) // 2
        if scaled_index(mid, s) >= depth:
            hi = mid
        else:
            lo = mid + 1
    return lo


def _refine_to_base(lo: Fraction, width: Fraction, radix: int) -> tuple[int, int, Fraction]:
    """Minimal a with a radix-adic cell of depth <a;radix> inside
    [lo, lo+width); returns (a, depth, eta) for the leftmost such cell."""
    hi = lo + width
    d = 0
    w = Fraction(1)
    while w >= width:
        d += 1
        w /= radix
    d = max(0, d - 2)
    while leftmost_cell_index(lo, hi, radix, d) is None:
        d += 1
    a = _minimal_nat_for_depth(d, radix)
    depth = scaled_index0(a, radix)
    idx = leftmost_cell_index(lo, hi, radix, depth)
    if idx is None:
        raise AssertionError("refinement guarantee violated")
    return a, depth, Fraction(idx, radix ** depth)


def _sample_blocks(rng: random.Random, alphabet: int, length: int, count: int) -> list[tuple[int, ...]]:
    """Distinct random digit blocks in lexicographic order."""
    space_small = alphabet ** length if length * math.log2(alphabet) < 48 else None
    if space_small is not None and space_small <= count:
        out = []
        for code in range(space_small):
            digs = []
            for _ in range(length):
                code, r = divmod(code, alphabet)
                digs.append(r)
            out.append(tuple(reversed(digs)))
        return out
    seen: set[tuple[int, ...]] = set()
    while len(seen) < count:
        seen.add(tuple(rng.randrange(alphabet) for _ in range(length)))
    return sorted(seen)


def _a_value_fast(p_num: int, q_den: int, R: Sequence[int], T: Sequence[int],
                  a_pos: int, ell: int) -> tuple[float, float]:
    """(A, error bound) for A(p/q, R, T, a_pos, ell) in float64.

    Sweeps (r^j t p mod q)/q incrementally; phases carry the documented
    top-64-bit extraction error, so the bound is conservative but rigorous.
    """
    total = 0.0
    err = 0.0
    two_pi = 2 * math.pi
    cos, sin = math.cos, math.sin
    for r in R:
        j0, j1 = window(a_pos, ell, r)
        w = j1 - j0
        r_j0 = pow(r, j0, q_den)
        for t in T:
            num = p_num * t % q_den * r_j0 % q_den
            s_re = 0.0
            s_im = 0.0
            for _ in range(w):
                ph = two_pi * float_fraction_ratio(num, q_den)
                s_re += cos(ph)
                s_im += sin(ph)
                num = num * r % q_den
            e = sum_term_error(w)
            total += s_re * s_re + s_im * s_im
            err += 2 * (math.hypot(s_re, s_im) + e) * e + e * e
    return total, err


def _a_test(p_num: int, q_den: int, R: Sequence[int], T: Sequence[int], a_pos: int,
            ell: int, threshold: Fraction) -> bool:
    """Certified A < threshold decision; escalates to interval arithmetic
    when the float enclosure straddles the threshold."""
    if not R:
        return True
    val, err = _a_value_fast(p_num, q_den, R, T, a_pos, ell)
    slack = Fraction(err + 1e-12 * (val + 1.0))
    if Fraction(val) + slack < threshold:
        return True
    if Fraction(val) - slack >= threshold:
        return False
    enc = exp_sum_A(Fraction(p_num, q_den), R, T, a_pos, ell,
                    precision=max(threshold / 10 ** 6, Fraction(1, 10 ** 15)))
    return enc.compare(threshold) == -1


def _suffix_cells(digits: Sequence[int], s: int, j0: int, j1: int, ncells: int) -> list[int]:
    """Cell counts of the points {s^j value} for j in [j0, j1), where the
    value has the given base-s digits (zeros beyond).  Exact: prefix reads
    are resolved with full-suffix arithmetic whenever a cell boundary falls
    inside the prefix resolution."""
    t = 1
    scale = s
    while scale < ncells << 24:
        t += 1
        scale *= s
    counts = [0] * ncells
    length = len(digits)
    for j in range(j0, j1):
        v = 0
        for i in range(j, j + t):
            v = v * s + (digits[i] if i < length else 0)
        cell_lo = v * ncells // scale
        cell_hi = ((v + 1) * ncells - 1) // scale
        if cell_lo == cell_hi:
            counts[cell_lo] += 1
        else:
            num = 0
            for i in range(j, length):
                num = num * s + digits[i]
            den = s ** max(length - j, 0)
            counts[num * ncells // den if den > 1 else 0] += 1
    return counts


def _family_dev(counts: Sequence[int], ncells: int) -> Fraction:
    n = sum(counts)
    if n == 0:
        return Fraction(1)
    return max(abs(Fraction(c, n) - Fraction(1, ncells)) for c in counts)


def _expand_digit(d: int, s: int, k: int) -> list[int]:
    out = []
    for _ in range(k):
        d, r = divmod(d, s)
        out.append(r)
    out.reverse()
    return out


@dataclass
class _Candidate:
    block: tuple[int, ...]
    p_num: int
    d_value: Optional[Fraction] = None


def _choose_block(*, sched: Schedule, stage: int, alphabet: int, n_ext: int,
                  shifted_num: int, q_den: int, radix: int, R: Sequence[int],
                  T: Sequence[int], a_pos: int, ell: int, threshold: Fraction,
                  extra_filter: Optional[Callable[[tuple[int, ...]], bool]],
                  minimize: Optional[Callable[[tuple[int, ...]], Fraction]],
                  info: dict) -> tuple[int, ...]:
    """Sample candidate blocks, apply the acceptance test (and optional
    filter), and return the selected block: the minimizer of ``minimize``
    among passers when given, else the lexicographically least passer."""
    count = sched.candidates
    for attempt in range(sched.candidate_rounds + 1):
        rng = sched.rng("stage", stage, "cand", attempt)
        blocks = _sample_blocks(rng, alphabet, n_ext, count)
        passers: list[_Candidate] = []
        filtered = 0
        for blk in blocks:
            ext = 0
            for d in blk:
                ext = ext * radix + d
            cand = _Candidate(blk, shifted_num + ext)
            if extra_filter is not None and not extra_filter(blk):
                continue
            filtered += 1
            if _a_test(cand.p_num, q_den, R, T, a_pos, ell, threshold):
                passers.append(cand)
        info["n_candidates"] = len(blocks)
        info["n_filtered"] = filtered
        info["n_passers"] = len(passers)
        info["pass_fraction"] = Fraction(len(passers), max(filtered, 1))
        if extra_filter is not None:
            info["filter_fraction"] = Fraction(filtered, len(blocks))
            if filtered == 0:
                count *= 2
                continue
        if passers:
            if sched.strict_claims and 2 * len(passers) < filtered:
                raise DeskAssertionError("exponential-sum candidate majority", stage,
                                         "pass fraction %s" % info["pass_fraction"])
            if minimize is None:
                return passers[0].block
            best = None
            for cand in passers:
                cand.d_value = minimize(cand.block)
                if best is None or cand.d_value < best.d_value:
                    best = cand
            info["min_window_dev"] = best.d_value
            return best.block
        count *= 2
    claim = ("defect-filter/exponential-sum intersection" if extra_filter is not None
             else "exponential-sum candidate majority")
    raise DeskAssertionError(claim, stage, "no candidate passed the acceptance test")


def _aligned_denial_ok(digits: Sequence[int], s: int, k: int) -> bool:
    """No aligned k-digit window reads all (s-1): the top cell of the s^k
    grid is avoided along the aligned orbit."""
    top = s - 1
    for i in range(0, len(digits) - k + 1, k):
        if all(digits[i + j] == top for j in range(k)):
            return False
    return True


def _denial_certificate(digits: Sequence[int], s: int, k: int) -> Optional[Fraction]:
    """Avoidance lower bound 1/(2 s^k) on the family discrepancy of the
    aligned s^k orbit over the top cell, when the digits support it."""
    n_aligned = len(digits) // k
    if n_aligned < 2 * s ** k:
        return None
    if not _aligned_denial_ok(digits, s, k):
        return None
    return Fraction(1, 2 * s ** k)


# --------------------------------------------------------------------------
# denial construction (normal on R, simple normality denied on S)


def run_denial(R: Sequence[int], S: Sequence[int], stages: int,
               sched: Schedule) -> tuple[ConstructedReal, RunReport]:
    """Stage machine denying simple normality to the bases in S while
    keeping every base in R normal.

    R must be closed under minimal representatives and disjoint from the
    dependence classes of S.  When 2 is in S it is replaced by 4 (its powers
    stay), and the base-4 stages additionally filter candidates through the
    binary defect condition and watch the binary simple discrepancy in the
    hold clause.
    """
    R_min = sorted({minimal_representative(r) for r in R})
    S_in = sorted(set(S))
    if not S_in:
        raise ValueError("S must be nonempty")
    two_mode = 2 in S_in
    if two_mode:
        S_in = sorted({4 if x == 2 else x for x in S_in})
    for s in S_in:
        for r in R_min:
            if minimal_representative(s) == minimal_representative(r):
                raise ValueError("S element %d depends multiplicatively on R element %d" % (s, r))
    report = RunReport("denial", sched.mode)
    real = ConstructedReal("denial")

    s_cur = S_in[0]
    eps = Fraction(1)
    ell = sched.cap_ell if sched.mode == "desk" else 0
    if sched.mode == "desk":
        report.add("initial extension length seeded with cap_ell=%d" % sched.cap_ell)
    R_cur: list[int] = [R_min[0]] if R_min else []
    c = 1
    b = 0
    digits: list[int] = []     # base s_cur expansion of the current value
    p_num = 0                  # value = p_num / s_cur^len(digits)
    count_top = 0              # digits equal to s_cur - 1
    count_zero_bits = 0        # binary zeros (only maintained while s_cur == 4)

    for m in range(1, stages + 1):
        info: dict = {"capped": []}
        n_orbit = len(digits)
        tail_dev = abs(Fraction(count_top, n_orbit) - Fraction(1, s_cur)) if n_orbit else None
        hold = n_orbit > 0 and tail_dev < Fraction(1, 4 * s_cur)
        if hold and two_mode and s_cur == 4:
            bin_dev = abs(Fraction(count_zero_bits, 2 * n_orbit) - Fraction(1, 2))
            info["binary_simple_dev"] = bin_dev
            hold = bin_dev < Fraction(1, 16)
        info["tail_dev"] = tail_dev

        clause = "hold"
        s_next, eps_next, ell_next, R_next, c_next = s_cur, eps, ell, list(R_cur), c
        if not hold:
            c_try = c + 1
            s_try = repeating_enumeration_list(S_in, c_try)
            r_new = next((r for r in R_min if r not in R_cur), None)
            pad = padding(s_cur, s_try)
            max_r = max(R_cur) if R_cur else 2
            cheap = certified_strict_floor_plus_one(
                lambda ctx: c_try * pad * ctx.log(max_r)) if R_cur else 1
            if sched.mode == "desk":
                big = max(cheap, sched.cap_ell)
                if big == sched.cap_ell and cheap < sched.cap_ell:
                    info["capped"].append("length budget formula replaced by cap_ell")
            else:
                R_for_budget = sorted(set(R_cur + ([r_new] if r_new else [])))
                formula = ell_budget(R_for_budget, s_try, 1, Fraction(1, c_try), sched.schmidt) \
                    if R_for_budget else cheap
                big = max(cheap, formula)
                if big > sched.faithful_ell_limit:
                    raise FaithfulBudgetError("extension length budget", big)
            gate_lhs = (Fraction(1, c_try) * scaled_index0(b, max_r)) if R_cur else Fraction(0)
            if b == 0 or gate_lhs > big + pad:
                clause = "advance"
                s_next, eps_next, ell_next, c_next = s_try, Fraction(1, c_try), big, c_try
                R_next = sorted(set(R_cur + ([r_new] if r_new is not None else [])))
            else:
                clause = "stall"
        if ell_next == 0:
            raise FaithfulBudgetError("bootstrap extension length", 0)

        # refinement into the (possibly new) base
        if s_next != s_cur:
            lo = Fraction(p_num, s_cur ** len(digits)) if digits else Fraction(0)
            width = Fraction(1, s_cur ** len(digits))
            a_pos, depth, eta = _refine_to_base(lo, width, s_next)
            digits = list(digits_of_fraction(eta, s_next, depth))
            p_num = eta.numerator * (s_next ** depth // eta.denominator) if depth else 0
            count_top = sum(1 for d in digits if d == s_next - 1)
            count_zero_bits = (sum(2 - bin(d).count("1") for d in digits)
                               if (two_mode and s_next == 4) else 0)
            s_cur = s_next
        else:
            a_pos = _minimal_nat_for_depth(len(digits), s_cur)
            depth = scaled_index0(a_pos, s_cur)
            if depth > len(digits):
                pad_n = depth - len(digits)
                digits.extend([0] * pad_n)
                p_num *= s_cur ** pad_n
                if two_mode and s_cur == 4:
                    count_zero_bits += 2 * pad_n

        alphabet = s_cur - 1 if s_cur % 2 == 1 else s_cur - 2
        lp, capped_t = _stage_weyl(eps_next, sched)
        if capped_t:
            info["capped"].append("weyl threshold floored at eps=%s" % sched.eps_a_floor)
        info["t_size"] = lp.m
        n_ext = scaled_index(a_pos + ell_next, s_cur) - depth
        threshold = (lp.delta * scaled_index(ell_next, max(R_cur)) ** 2
                     if R_cur else Fraction(0))
        q_den = s_cur ** (depth + n_ext)
        shifted = p_num * s_cur ** n_ext

        extra = None
        if two_mode and s_cur == 4:
            limit = (3 * n_ext) // 4
            extra = lambda blk, _lim=limit: sum(blk) <= _lim
        block = _choose_block(
            sched=sched, stage=m, alphabet=alphabet, n_ext=n_ext, shifted_num=shifted,
            q_den=q_den, radix=s_cur, R=R_cur, T=list(lp.T), a_pos=a_pos, ell=ell_next,
            threshold=threshold, extra_filter=extra, minimize=None, info=info)

        ext = 0
        for d in block:
            ext = ext * s_cur + d
        p_num = shifted + ext
        digits.extend(block)
        count_top += sum(1 for d in block if d == s_cur - 1)
        if two_mode and s_cur == 4:
            count_zero_bits += sum(2 - bin(d).count("1") for d in block)
        b = a_pos + ell_next
        eps, ell, R_cur, c = eps_next, ell_next, R_next, c_next

        real.value = Fraction(p_num, q_den)
        real.width = Fraction(1, q_den)
        cert = _denial_certificate(digits, s_cur, 1)
        info["avoid_cert"] = cert
        info["checkpoint_digits"] = len(digits)
        real.stages.append(StageState(
            index=m, clause=clause, s=s_cur, k=1, eps=eps, b=b, ell=ell, c=c, x=None,
            k_bar=None, R=tuple(R_cur), a=a_pos, block=block,
            lo=real.value, hi=real.value + real.width, info=info))
        report.add("stage %d: %s s=%d eps=%s b=%d ell=%d |block|=%d pass=%s cert=%s%s"
                   % (m, clause, s_cur, eps, b, ell, len(block),
                      info.get("pass_fraction"), cert,
                      " capped[%s]" % "; ".join(info["capped"]) if info["capped"] else ""))
    return real, report


# --------------------------------------------------------------------------
# slow-base construction (absolutely normal, one base arbitrarily slow)


def run_slow_base(s: int, g: Callable[[int], Fraction], stages: int,
                  sched: Schedule) -> tuple[ConstructedReal, RunReport, list[tuple[int, Fraction]]]:
    """Stage machine for an absolutely normal expansion whose base-s
    discrepancy stays above the (decreasing) schedule g while every
    multiplicatively independent base is controlled uniformly.

    Returns the constructed real, the report, and the trace of the
    dominating function f at stage boundaries.
    """
    check_base(s)
    report = RunReport("slow-base", sched.mode)
    real = ConstructedReal("slow-base")

    r0 = 2
    while minimal_representative(r0) == minimal_representative(s) or not is_minimal_representative(r0):
        r0 += 1
    R_cur = [r0]
    eps = Fraction(1)
    k = 1
    k_bar = 1
    b = 1
    digits: list[int] = []   # base-s expansion
    p_num = 0
    g_checked: list[Fraction] = []

    for m in range(1, stages + 1):
        info: dict = {"capped": []}
        # growth clause: try to add the next independent base and halve eps
        r_next = max(R_cur) + 1
        while (minimal_representative(r_next) == minimal_representative(s)
               or not is_minimal_representative(r_next)):
            r_next += 1
        if sched.mode == "desk":
            budget = sched.cap_ell
            info["capped"].append("length budget formula replaced by cap_ell")
        else:
            budget = ell_budget(sorted(R_cur + [r_next]), s, k_bar + 1, eps / 2, sched.schmidt)
            if budget > sched.faithful_ell_limit:
                raise FaithfulBudgetError("extension length budget", budget)
        if (eps / 2) * scaled_index(b, r_next) >= budget:
            eps_next = eps / 2
            R_next = sorted(R_cur + [r_next])
            k_bar_next = k_bar + 1
            clause = "advance"
        else:
            eps_next, R_next, k_bar_next = eps, list(R_cur), k_bar
            clause = "stall"
        ell_next = budget
        b_next = b + ell_next

        # denial-depth clause: deepen k when the schedule has dropped enough
        g_here = Fraction(g(scaled_index(b, s)))
        g_checked.append(g_here)
        if any(g2 > g1 for g1, g2 in zip(g_checked, g_checked[1:])):
            raise ValueError("schedule g must be monotonically decreasing on queried points")
        k_cand = k
        k_lim = min(k_bar_next, sched.cap_k) if sched.mode == "desk" else k_bar_next
        for kk in range(k_lim, 0, -1):
            if Fraction(1, 2 * s ** kk) > g_here:
                k_cand = kk
                break
        k_next = k_cand if k_cand > k else k
        if sched.mode == "desk" and k_next != k:
            info["capped"].append("denial depth chosen by schedule gate, cap_k=%d" % sched.cap_k)

        radix = s ** k_next
        alphabet = radix - 1 if s % 2 == 1 else radix - 2
        lp, capped_t = _stage_weyl(eps_next, sched)
        if capped_t:
            info["capped"].append("weyl threshold floored at eps=%s" % sched.eps_a_floor)
        prec0 = scaled_index(b, radix)
        # regrid the current digits onto the s^k grid at position prec0
        target_len = k_next * prec0
        if target_len < len(digits):
            raise AssertionError("grid regression: extension would overwrite digits")
        pad_n = target_len - len(digits)
        digits.extend([0] * pad_n)
        p_num *= s ** pad_n
        n_ext = scaled_index(b + ell_next, radix) - prec0
        q_den = s ** (target_len + k_next * n_ext)
        shifted = p_num * s ** (k_next * n_ext)
        threshold = lp.delta * scaled_index(ell_next, max(R_cur)) ** 2
        ncells = 12 * radix

        # window exponents (<b;s>, <b+ell;s>]: exponent e reads digit index e on
        e0 = scaled_index(b, s) + 1
        e1 = scaled_index(b + ell_next, s) + 1

        def minimize(blk: tuple[int, ...], _k=k_next) -> Fraction:
            ext_digits = []
            for d in blk:
                ext_digits.extend(_expand_digit(d, s, _k))
            view = (digits + ext_digits)[e0:]
            return _family_dev(_suffix_cells(view, s, 0, e1 - e0, ncells), ncells)

        block = _choose_block(
            sched=sched, stage=m, alphabet=alphabet, n_ext=n_ext, shifted_num=shifted,
            q_den=q_den, radix=radix, R=R_cur, T=list(lp.T), a_pos=b, ell=ell_next,
            threshold=threshold, extra_filter=None, minimize=minimize, info=info)

        ext_digits: list[int] = []
        for d in block:
            ext_digits.extend(_expand_digit(d, s, k_next))
        digits.extend(ext_digits)
        for d in ext_digits:
            p_num = p_num * s + d
        eps, R_cur, k_bar, k, b = eps_next, R_next, k_bar_next, k_next, b_next

        real.value = Fraction(p_num, s ** len(digits))
        real.width = Fraction(1, s ** len(digits))
        cert = _denial_certificate(digits, s, k)
        info["avoid_cert"] = cert
        info["g_at_checkpoint"] = Fraction(g(scaled_index(b, s)))
        info["checkpoint_digits"] = len(digits)
        real.stages.append(StageState(
            index=m, clause=clause, s=s, k=k, eps=eps, b=b, ell=ell_next, c=None, x=None,
            k_bar=k_bar, R=tuple(R_cur), a=b - ell_next, block=block,
            lo=real.value, hi=real.value + real.width, info=info))
        report.add("stage %d: %s k=%d eps=%s b=%d |R|=%d pass=%s cert=%s mindev=%s"
                   % (m, clause, k, eps, b, len(R_cur), info.get("pass_fraction"),
                      cert, info.get("min_window_dev")))

    f_trace = _f_trace(real.stages)
    return real, report, f_trace


def _f_trace(stages: Sequence[StageState]) -> list[tuple[int, Fraction]]:
    """Dominating-trace values at stage boundaries: for checkpoint n = b_m,
    f(n) = 4 * eps of the last stage whose eps-scale still clears its own
    boundary (maximal m0 with eps_m0 * <b_m; max R_m0> > b_m0)."""
    out = []
    for st in stages:
        n = st.b
        m0_eps = None
        for cand in stages:
            if cand.index > st.index:
                break
            if cand.eps * scaled_index(n, max(cand.R)) > cand.b:
                m0_eps = cand.eps
        if m0_eps is None:
            m0_eps = stages[0].eps
        out.append((n, 4 * m0_eps))
    return out


# --------------------------------------------------------------------------
# selective construction (normality prescribed by a predicate)


def run_selective(theta: PredicateOracle, stages: int, sched: Schedule,
                  enum_m: Callable[[int], int] = repeating_enumeration_m
                  ) -> tuple[ConstructedReal, RunReport]:
    """Stage machine tying normality per base to the predicate
    forall x exists y forall z theta(x, y, z), monitored through the
    canonical repeating enumeration of minimal representatives."""
    report = RunReport("selective", sched.mode)
    real = ConstructedReal("selective")
    calls = 0

    def oracle(x: int, y: int, z: int) -> bool:
        nonlocal calls
        calls += 1
        if calls > sched.oracle_budget:
            raise OracleBudgetError("oracle call budget %d exceeded" % sched.oracle_budget)
        return bool(theta.evaluator(x, y, z))

    xi = Fraction(0)
    b, s_cur, k, eps = 1, 3, 1, Fraction(1)
    ell = sched.cap_ell if sched.mode == "desk" else 1
    if sched.mode == "desk":
        report.add("initial extension length seeded with cap_ell=%d" % sched.cap_ell)
    x_cur, c = 1, 1
    R_cur: list[int] = []
    width = Fraction(1, 3 ** scaled_index(1, 3))

    for m in range(1, stages + 1):
        info: dict = {"capped": []}
        radix = s_cur ** k
        n_prefix = scaled_index0(b, s_cur)
        prefix_digits = list(digits_of_fraction(xi, s_cur, n_prefix)) if n_prefix else []
        ncells_hold = 12 * radix
        hold_dev = (_family_dev(_suffix_cells(prefix_digits, s_cur, 0, n_prefix, ncells_hold),
                                ncells_hold) if n_prefix else Fraction(1))
        info["hold_dev"] = hold_dev
        hold = n_prefix > 0 and hold_dev < Fraction(1, ncells_hold) ** 2

        clause = "hold"
        s_next, k_next, eps_next, ell_next, x_next, c_next = s_cur, k, eps, ell, x_cur, c
        R_next = list(R_cur)
        if not hold:
            c_try = c + 1
            s_try = enum_m(c_try)
            n_prev = max((i for i in range(1, c_try) if enum_m(i) == s_try), default=0)
            x_found = None
            for x_probe in range(1, c_try):
                for y in range(n_prev):
                    if (all(oracle(x_probe, y, z) for z in range(n_prev))
                            and any(not oracle(x_probe, y, z) for z in range(c_try))):
                        x_found = x_probe
                        break
                if x_found is not None:
                    break
            x_try = x_found if x_found is not None else c_try
            info["x_search"] = x_try
            if sched.mode == "desk":
                k_try = 1
                while s_try ** k_try < 4 * x_try and k_try < sched.cap_k:
                    k_try += 1
                info["capped"].append("denial depth from desk rule (s^k >= 4x), cap_k=%d"
                                      % sched.cap_k)
            else:
                k_try, n0_try, _ = restricted_alphabet_params(s_try, Fraction(1, x_try))
                if k_try > 12:
                    raise FaithfulBudgetError("denial depth k", k_try)
            R_try = sorted({enum_m(i) for i in range(1, c_try)} - {s_try})
            pad = padding(s_cur, s_try)
            biggest = max(R_try + [s_try])
            cheap = certified_strict_floor_plus_one(
                lambda ctx: max(x_try, c_try, 2 * s_try ** k_try) * ctx.log(biggest) * pad)
            if sched.mode == "desk":
                L = max(cheap, sched.cap_ell)
                info["capped"].append("length budget formula replaced by cap_ell")
            else:
                formula = ell_budget(R_try, s_try, k_try, Fraction(1, c_try), sched.schmidt) \
                    if R_try else cheap
                L = max(cheap, formula, n0_try)
                if L > sched.faithful_ell_limit:
                    raise FaithfulBudgetError("extension length budget", L)
            stall = any(Fraction(1, c_try) * scaled_index0(b, r) <= L + pad for r in R_try) \
                or Fraction(1, x_try) * scaled_index0(b, s_try) <= L + pad
            if stall:
                clause = "stall"
            else:
                clause = "advance"
                s_next, k_next, eps_next, ell_next = s_try, k_try, Fraction(1, c_try), L
                x_next, c_next, R_next = x_try, c_try, R_try

        radix_next = s_next ** k_next
        a_pos, depth, eta = _refine_to_base(xi, width, radix_next)
        alphabet = radix_next - 1 if s_next % 2 == 1 else radix_next - 2
        lp, capped_t = _stage_weyl(eps_next, sched)
        if capped_t:
            info["capped"].append("weyl threshold floored at eps=%s" % sched.eps_a_floor)
        b_next = a_pos + ell_next
        n_ext = scaled_index(a_pos + ell_next, radix_next) - depth
        q_den = radix_next ** (depth + n_ext)
        eta_num = eta.numerator * (radix_next ** depth // eta.denominator) if depth else 0
        shifted = eta_num * radix_next ** n_ext
        threshold = (lp.delta * scaled_index(ell_next, max(R_next)) ** 2
                     if R_next else Fraction(0))
        ncells = 12 * radix_next
        eta_s_digits = list(digits_of_fraction(eta, s_next, k_next * depth)) if depth else []
        # window exponents (<a;s>, <b;s>]: exponent e reads digit index e on
        j0 = scaled_index0(a_pos, s_next) + 1
        j1 = scaled_index(b_next, s_next) + 1

        def minimize(blk: tuple[int, ...], _eta=eta_s_digits, _j0=j0, _j1=j1,
                     _s=s_next, _k=k_next, _nc=ncells) -> Fraction:
            ext_digits: list[int] = []
            for d in blk:
                ext_digits.extend(_expand_digit(d, _s, _k))
            view = (_eta + ext_digits)[_j0:]
            return _family_dev(_suffix_cells(view, _s, 0, _j1 - _j0, _nc), _nc)

        block = _choose_block(
            sched=sched, stage=m, alphabet=alphabet, n_ext=n_ext, shifted_num=shifted,
            q_den=q_den, radix=radix_next, R=R_next, T=list(lp.T), a_pos=a_pos,
            ell=ell_next, threshold=threshold, extra_filter=None, minimize=minimize,
            info=info)

        ext = 0
        for d in block:
            ext = ext * radix_next + d
        xi = Fraction(shifted + ext, q_den)
        width = Fraction(1, q_den)
        s_cur, k, eps, ell, x_cur, c, R_cur, b = (s_next, k_next, eps_next, ell_next,
                                                  x_next, c_next, R_next, b_next)
        real.value, real.width = xi, width
        info["checkpoint_digits"] = scaled_index(b, s_cur)
        real.stages.append(StageState(
            index=m, clause=clause, s=s_cur, k=k, eps=eps, b=b, ell=ell, c=c, x=x_cur,
            k_bar=None, R=tuple(R_cur), a=a_pos, block=block,
            lo=xi, hi=xi + width, info=info))
        report.add("stage %d: %s s=%d k=%d c=%d x=%d b=%d pass=%s mindev=%s"
                   % (m, clause, s_cur, k, c, x_cur, b, info.get("pass_fraction"),
                      info.get("min_window_dev")))
    return real, report
