"""Command-line surface.

Subcommands:

* ``construct`` -- run one of the stage machines (select / slowbase / deny)
  and write a run file plus optional digit renderings.
* ``analyze``   -- emit a CSV discrepancy trace for a digit or run file.
* ``bounds``    -- print the certified threshold/budget values.
* ``verify``    -- run a property suite; exit 1 on any counterexample.

Exit codes: 0 success, 1 verify counterexample, 2 input validation,
3 desk-mode existence-assertion failure (message names the claim and the
stage), 4 precision/oracle/faithful budget exhaustion.

A plain ``key = value`` config file can supply defaults; explicit flags
beat the config, which beats built-ins.  Digit files stream from and to
stdin/stdout when the path is ``-``.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .analyze import EXACT_CAP_DEFAULT, checkpoints, trace_digits, write_csv
from .basechange import nested_refinement_offset, padding
from .construct import (
    ConstructedReal,
    DeskAssertionError,
    FaithfulBudgetError,
    ORACLE_TRUE,
    ORACLE_Z_LT_Y,
    OracleBudgetError,
    PredicateOracle,
    Schedule,
    ell_budget,
    g_log2,
    run_denial,
    run_selective,
    run_slow_base,
)
from .counting import restricted_alphabet_params
from .discrepancy import transfer_length_bound
from .enclosure import PrecisionError
from .expsums import SchmidtConfig, cosine_constant, leveque_parameters, majority_length_bound, schmidt_p
from .numerics import DigitBlock
from .runio import atomic_writer, read_digit_file, read_run_file, write_digit_file, write_run_file
from .verify import SUITES

__all__ = ["main"]

EXIT_OK = 0
EXIT_COUNTEREXAMPLE = 1
EXIT_USAGE = 2
EXIT_DESK_ASSERTION = 3
EXIT_BUDGET = 4

ORACLES = {"true": ORACLE_TRUE, "z-lt-y": ORACLE_Z_LT_Y}
SCHEDULES_G = {"log2": g_log2}


class _CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_USAGE):
        super().__init__(message)
        self.code = code


def _read_config(path: Optional[str]) -> dict[str, str]:
    if not path:
        return {}
    out: dict[str, str] = {}
    try:
        with open(path, "r", encoding="utf-8") as fp:
            for line in fp:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise _CliError("config line without '=': %r" % line)
                key, value = line.split("=", 1)
                out[key.strip()] = value.strip()
    except OSError as exc:
        raise _CliError("cannot read config: %s" % exc)
    return out


def _setting(args, config: dict[str, str], name: str, default, cast=str):
    flag_val = getattr(args, name.replace("-", "_"), None)
    if flag_val is not None:
        return flag_val
    if name in config:
        return cast(config[name])
    return default


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError("not a rational: %r" % text)


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok]
    except ValueError:
        raise argparse.ArgumentTypeError("not a comma list of integers: %r" % text)


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="normbase",
                                  description="digit expansions with prescribed normality "
                                              "behavior across bases")
    top.add_argument("--config", help="key = value defaults file")
    sub = top.add_subparsers(dest="command", required=True)

    con = sub.add_parser("construct", help="run a stage machine")
    con.add_argument("machine", choices=["select", "slowbase", "deny"])
    con.add_argument("--R", type=_int_list, default=None, help="comma list of bases kept normal")
    con.add_argument("--S", type=_int_list, default=None, help="comma list of denial bases")
    con.add_argument("--s", type=int, default=None, help="slow base (slowbase machine)")
    con.add_argument("--g", choices=sorted(SCHEDULES_G), default=None,
                     help="slow-base target schedule")
    con.add_argument("--oracle", choices=sorted(ORACLES), default=None,
                     help="predicate oracle (select machine)")
    con.add_argument("--stages", type=int, default=None)
    con.add_argument("--mode", choices=["desk", "faithful"], default=None)
    con.add_argument("--cap-ell", type=int, default=None)
    con.add_argument("--cap-k", type=int, default=None)
    con.add_argument("--candidates", type=int, default=None)
    con.add_argument("--eps-a-floor", type=_fraction, default=None)
    con.add_argument("--schmidt-c", type=_fraction, default=None)
    con.add_argument("--seed", type=int, default=None)
    con.add_argument("--out", required=True, help="run file path")
    con.add_argument("--render", action="append", default=[],
                     metavar="BASE:COUNT:PATH", help="emit a digit file (repeatable)")
    con.add_argument("--ftrace-out", default=None, help="CSV of the dominating trace (slowbase)")
    con.add_argument("--quiet", action="store_true")

    ana = sub.add_parser("analyze", help="emit a CSV discrepancy trace")
    ana.add_argument("input", help="digit file, run file, or - for stdin (digit stream)")
    ana.add_argument("--bases", type=_int_list, default=None, help="analysis bases")
    ana.add_argument("--checkpoints", choices=["geometric", "linear"], default=None)
    ana.add_argument("--start", type=int, default=None, help="first geometric checkpoint")
    ana.add_argument("--step", type=int, default=None, help="linear checkpoint step")
    ana.add_argument("--exact-cap", type=int, default=None,
                     help="largest N computed with exact rationals")
    ana.add_argument("--block-ell", type=int, default=None)
    ana.add_argument("--per-stage", action="store_true",
                     help="align checkpoints to stage boundaries (run files)")
    ana.add_argument("--render-digits", type=int, default=None,
                     help="digits to render from a run file (default: all determined)")
    ana.add_argument("--exact", action="store_true", help="emit p/q instead of decimals")
    ana.add_argument("--out", default="-", help="CSV path or - for stdout")

    bnd = sub.add_parser("bounds", help="print certified thresholds and budgets")
    bsub = bnd.add_subparsers(dest="bound", required=True)
    b_lev = bsub.add_parser("leveque")
    b_lev.add_argument("--eps", type=_fraction, required=True)
    b_pad = bsub.add_parser("padding")
    b_pad.add_argument("--s0", type=int, required=True)
    b_pad.add_argument("--s1", type=int, required=True)
    b_tr = bsub.add_parser("transfer")
    b_tr.add_argument("--r", type=int, required=True)
    b_tr.add_argument("--eps", type=_fraction, required=True)
    b_al = bsub.add_parser("alphabet")
    b_al.add_argument("--s", type=int, required=True)
    b_al.add_argument("--eps", type=_fraction, required=True)
    b_al.add_argument("--parity", choices=["odd", "even"], default="even")
    b_mj = bsub.add_parser("majority")
    b_mj.add_argument("--R", type=_int_list, required=True)
    b_mj.add_argument("--t-count", type=int, required=True)
    b_mj.add_argument("--s", type=int, required=True)
    b_mj.add_argument("--k", type=int, default=1)
    b_mj.add_argument("--c", type=_fraction, default=Fraction(1, 100))
    b_sp = bsub.add_parser("schmidt-p")
    b_sp.add_argument("--R", type=_int_list, required=True)
    b_sp.add_argument("--T", type=_int_list, required=True)
    b_sp.add_argument("--s", type=int, required=True)
    b_cc = bsub.add_parser("cosine")
    b_cc.add_argument("--precision", type=_fraction, default=Fraction(1, 10 ** 12))
    b_el = bsub.add_parser("ell")
    b_el.add_argument("--R", type=_int_list, required=True)
    b_el.add_argument("--s", type=int, required=True)
    b_el.add_argument("--k", type=int, default=1)
    b_el.add_argument("--eps", type=_fraction, required=True)
    b_el.add_argument("--c", type=_fraction, default=Fraction(1, 100))

    ver = sub.add_parser("verify", help="run a property suite")
    ver.add_argument("suite", help="one of: %s" % ", ".join(sorted(SUITES)))
    ver.add_argument("--n", type=int, default=None, help="trial count")
    ver.add_argument("--samples", type=int, default=None)
    ver.add_argument("--eps", type=_fraction, default=None)
    ver.add_argument("--R", type=_int_list, default=None)
    ver.add_argument("--s", type=int, default=None)
    ver.add_argument("--ell", type=int, default=None)
    ver.add_argument("--N", type=_int_list, default=None, help="lengths for base4-defect")
    ver.add_argument("--exhaustive", action="store_true")
    ver.add_argument("--sample", type=int, default=None)
    ver.add_argument("--seed", type=int, default=None)
    return top


def _schedule_from(args, config) -> Schedule:
    c = Fraction(_setting(args, config, "schmidt-c", Fraction(1, 100), Fraction))
    return Schedule(
        mode=_setting(args, config, "mode", "desk"),
        cap_ell=int(_setting(args, config, "cap-ell", 256, int)),
        cap_k=int(_setting(args, config, "cap-k", 3, int)),
        candidates=int(_setting(args, config, "candidates", 48, int)),
        eps_a_floor=Fraction(_setting(args, config, "eps-a-floor", Fraction(1), Fraction)),
        seed=int(_setting(args, config, "seed", 0, int)),
        schmidt=SchmidtConfig(c=c),
    )


def _cmd_construct(args, config) -> int:
    sched = _schedule_from(args, config)
    stages = int(_setting(args, config, "stages", 10, int))
    if args.machine == "deny":
        if not args.S:
            raise _CliError("deny needs --S")
        real, report = run_denial(args.R or [], args.S, stages, sched)
        ftrace = None
    elif args.machine == "slowbase":
        if not args.s:
            raise _CliError("slowbase needs --s")
        g = SCHEDULES_G[_setting(args, config, "g", "log2")]
        real, report, ftrace = run_slow_base(args.s, g, stages, sched)
    else:
        oracle = ORACLES[_setting(args, config, "oracle", "true")]
        real, report = run_selective(oracle, stages, sched)
        ftrace = None
    write_run_file(args.out, real)
    for spec_str in args.render:
        parts = spec_str.split(":")
        if len(parts) != 3:
            raise _CliError("--render expects BASE:COUNT:PATH, got %r" % spec_str)
        base, count, path = int(parts[0]), int(parts[1]), parts[2]
        block, undetermined = real.render_digits(base, count)
        if undetermined and not args.quiet:
            print("render base %d: %d of %d digits undetermined"
                  % (base, undetermined, count), file=sys.stderr)
        if path == "-":
            write_digit_file(sys.stdout, base, block.digits)
        else:
            write_digit_file(path, base, block.digits)
    if args.machine == "slowbase" and args.ftrace_out:
        with atomic_writer(args.ftrace_out) as fp:
            fp.write("n,f\n")
            for n, f in ftrace:
                fp.write("%d,%s\n" % (n, f))
    if not args.quiet:
        print(report.text())
    return EXIT_OK


def _load_analysis_input(args) -> tuple[DigitBlock, Optional[ConstructedReal]]:
    if args.input == "-":
        return read_digit_file(sys.stdin), None
    with open(args.input, "r", encoding="utf-8") as fp:
        head = fp.readline().strip()
    if head.startswith("nfrun/"):
        real = read_run_file(args.input)
        if not real.stages:
            raise _CliError("run file has no stages")
        base = real.stages[-1].s
        want = args.render_digits
        if want is None:
            block, _ = real.render_digits(base, _determined_budget(real, base))
        else:
            block, undet = real.render_digits(base, want)
            if undet:
                print("note: %d requested digits undetermined" % undet, file=sys.stderr)
        return block, real
    return read_digit_file(args.input), None


def _determined_budget(real: ConstructedReal, base: int) -> int:
    width = real.width
    n = 0
    cell = Fraction(1)
    while cell > width and n < 10 ** 7:
        cell /= base
        n += 1
    return n


def _cmd_analyze(args, config) -> int:
    digits, real = _load_analysis_input(args)
    bases = args.bases or [digits.base]
    mode = _setting(args, config, "checkpoints", "geometric")
    start = int(_setting(args, config, "start", 64, int))
    step = int(_setting(args, config, "step", 1000, int))
    cap = int(_setting(args, config, "exact-cap", EXACT_CAP_DEFAULT, int))
    if args.per_stage:
        if real is None:
            raise _CliError("--per-stage needs a run file input")
        ns = sorted({min(st.info.get("checkpoint_digits", len(digits)), len(digits))
                     for st in real.stages} | {len(digits)})
        ns = [n for n in ns if n >= 1]
    else:
        ns = checkpoints(len(digits), mode=mode, start=start, step=step)
    rows = trace_digits(digits, bases, ns, exact_cap=cap, block_ell=args.block_ell)
    if args.out == "-":
        write_csv(rows, sys.stdout, exact=args.exact)
    else:
        with atomic_writer(args.out) as fp:
            write_csv(rows, fp, exact=args.exact)
    return EXIT_OK


def _cmd_bounds(args, config) -> int:
    if args.bound == "leveque":
        lp = leveque_parameters(args.eps)
        print("T = {1, ..., %d}" % lp.m)
        print("delta = %s (~= %.10g)" % (lp.delta, float(lp.delta)))
    elif args.bound == "padding":
        print("offset = %d" % nested_refinement_offset(args.s0, args.s1))
        print("padding = %d" % padding(args.s0, args.s1))
    elif args.bound == "transfer":
        ell0, ncells = transfer_length_bound(args.r, args.eps)
        print("ell0 = %d" % ell0)
        print("cells = %d" % ncells)
    elif args.bound == "alphabet":
        k, n0, alphabet = restricted_alphabet_params(args.s, args.eps, args.parity)
        print("k = %d" % k)
        print("N0 = %d" % n0)
        print("s_tilde = %d" % alphabet.s_tilde)
    elif args.bound == "majority":
        value = majority_length_bound(args.R, args.t_count, (args.s, args.k),
                                      SchmidtConfig(args.c))
        print("ell0 = %d" % value)
        print("(report-only: %d digits)" % len(str(value)))
    elif args.bound == "schmidt-p":
        print("p = %d" % schmidt_p(args.R, args.T, args.s))
    elif args.bound == "cosine":
        enc = cosine_constant(args.precision)
        print("c~ in [%s, %s]" % (float(enc.lower), float(enc.upper)))
        print("midpoint = %.15g radius <= %.3g" % (float(enc.midpoint), float(enc.radius)))
    elif args.bound == "ell":
        value = ell_budget(args.R, args.s, args.k, args.eps, SchmidtConfig(args.c))
        print("ell = %d" % value)
        print("(report-only: %d digits)" % len(str(value)))
    return EXIT_OK


def _cmd_verify(args, config) -> int:
    name = args.suite
    if name not in SUITES:
        raise _CliError("unknown suite %r (have: %s)" % (name, ", ".join(sorted(SUITES))))
    kwargs = {}
    seed = args.seed if args.seed is not None else 0
    if name == "discrepancy-oracle":
        kwargs = dict(n_random=args.n or 1000, seed=seed)
    elif name == "partition":
        kwargs = dict(trials=args.n or 10 ** 4, seed=seed)
    elif name == "weyl-threshold":
        kwargs = dict(trials=args.n or 1000, seed=seed)
    elif name == "block-transfer":
        kwargs = dict(samples=args.samples or args.n or 10 ** 5, seed=seed)
        if args.eps is not None:
            kwargs["eps"] = args.eps
    elif name == "base4-defect":
        if args.N:
            kwargs = dict(n_values=tuple(args.N))
    elif name == "candidate-majority":
        kwargs = dict(R=tuple(args.R or (2,)), s=args.s or 3, ell=args.ell or 12, seed=seed)
        if not args.exhaustive and args.sample:
            kwargs["sample"] = args.sample
    elif name == "refinement":
        kwargs = dict(trials=args.n or 10 ** 4, seed=seed)
    result = SUITES[name](**kwargs)
    print(result.summary())
    for witness in result.witnesses:
        print("counterexample: %s" % witness)
    return EXIT_OK if result.passed else EXIT_COUNTEREXAMPLE


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        config = _read_config(args.config)
        if args.command == "construct":
            return _cmd_construct(args, config)
        if args.command == "analyze":
            return _cmd_analyze(args, config)
        if args.command == "bounds":
            return _cmd_bounds(args, config)
        if args.command == "verify":
            return _cmd_verify(args, config)
        raise _CliError("unknown command")
    except _CliError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return exc.code
    except (ValueError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except DeskAssertionError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_DESK_ASSERTION
    except (PrecisionError, OracleBudgetError, FaithfulBudgetError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
