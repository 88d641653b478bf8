"""Run files and digit files.

Two line-oriented text formats, UTF-8 with LF endings:

* run file, header ``nfrun/1``: one record per stage with tab-separated
  fields  stage_index, clause, s, k, eps (p/q), b, ell, c, x, R (comma
  list), block digits (space separated, working-base integers), interval
  lo, interval hi (exact rationals p/q).  Fields that do not apply to a
  construction are written as ``-``.
* digit file, header ``nfdig/1 base=<b>``: digits as ASCII integers
  separated by single spaces, 64 per line.

Writes go to a temporary file in the target directory followed by an
atomic rename, so failed commands never leave partial files.
"""

from __future__ import annotations

import io
import os
import tempfile
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import IO, Iterable, Optional, Sequence

from .construct import ConstructedReal, StageState
from .numerics import DigitBlock

__all__ = [
    "RUN_MAGIC",
    "DIGIT_MAGIC",
    "atomic_writer",
    "write_run_file",
    "read_run_file",
    "write_digit_file",
    "read_digit_file",
    "run_file_text",
]

RUN_MAGIC = "nfrun/1"
DIGIT_MAGIC = "nfdig/1"


@contextmanager
def atomic_writer(path: str):
    """Text file handle committed to ``path`` only on success."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fp:
            yield fp
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _frac(q: Fraction) -> str:
    return "%d/%d" % (q.numerator, q.denominator)


def _parse_frac(text: str) -> Fraction:
    return Fraction(text)


def _opt(v) -> str:
    return "-" if v is None else str(v)


def _parse_opt(text: str) -> Optional[int]:
    return None if text == "-" else int(text)


def run_file_text(real: ConstructedReal) -> str:
    out = io.StringIO()
    _write_run(out, real)
    return out.getvalue()


def _write_run(fp: IO[str], real: ConstructedReal) -> None:
    fp.write(RUN_MAGIC + "\n")
    for st in real.stages:
        fields = [
            str(st.index),
            st.clause,
            str(st.s),
            str(st.k),
            _frac(st.eps),
            str(st.b),
            str(st.ell),
            _opt(st.c),
            _opt(st.x),
            ",".join(str(r) for r in st.R) if st.R else "-",
            " ".join(str(d) for d in st.block) if st.block else "-",
            _frac(st.lo),
            _frac(st.hi),
        ]
        fp.write("\t".join(fields) + "\n")


def write_run_file(path: str, real: ConstructedReal) -> None:
    with atomic_writer(path) as fp:
        _write_run(fp, real)


def read_run_file(source) -> ConstructedReal:
    """Parse a run file from a path or text handle."""
    if isinstance(source, str):
        with open(source, "r", encoding="utf-8") as fp:
            return read_run_file(fp)
    header = source.readline().rstrip("\n")
    if header != RUN_MAGIC:
        raise ValueError("not a %s file (header %r)" % (RUN_MAGIC, header))
    real = ConstructedReal(kind="loaded")
    for line in source:
        line = line.rstrip("\n")
        if not line:
            continue
        f = line.split("\t")
        if len(f) != 13:
            raise ValueError("malformed stage record: %r" % line)
        st = StageState(
            index=int(f[0]), clause=f[1], s=int(f[2]), k=int(f[3]),
            eps=_parse_frac(f[4]), b=int(f[5]), ell=int(f[6]),
            c=_parse_opt(f[7]), x=_parse_opt(f[8]),
            k_bar=None,
            R=tuple(int(r) for r in f[9].split(",")) if f[9] != "-" else (),
            a=0,
            block=tuple(int(d) for d in f[10].split()) if f[10] != "-" else (),
            lo=_parse_frac(f[11]), hi=_parse_frac(f[12]))
        real.stages.append(st)
    if real.stages:
        last = real.stages[-1]
        real.value = last.lo
        real.width = last.hi - last.lo
    return real


def write_digit_file(target, base: int, digits: Sequence[int], per_line: int = 64) -> None:
    """Write a digit file to a path or text handle ('-' handled by the CLI)."""
    if isinstance(target, str):
        with atomic_writer(target) as fp:
            write_digit_file(fp, base, digits, per_line)
        return
    target.write("%s base=%d\n" % (DIGIT_MAGIC, base))
    line: list[str] = []
    for d in digits:
        line.append(str(d))
        if len(line) == per_line:
            target.write(" ".join(line) + "\n")
            line = []
    if line:
        target.write(" ".join(line) + "\n")


def read_digit_file(source) -> DigitBlock:
    """Parse a digit file from a path or text handle."""
    if isinstance(source, str):
        with open(source, "r", encoding="utf-8") as fp:
            return read_digit_file(fp)
    header = source.readline().strip()
    parts = header.split()
    if len(parts) != 2 or parts[0] != DIGIT_MAGIC or not parts[1].startswith("base="):
        raise ValueError("not a %s file (header %r)" % (DIGIT_MAGIC, header))
    base = int(parts[1][5:])
    digits: list[int] = []
    for line in source:
        digits.extend(int(tok) for tok in line.split())
    return DigitBlock(base, tuple(digits))
