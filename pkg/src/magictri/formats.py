"""The ``.tri`` text format and serialisation of results.

``.tri`` layout::

    4
    2 15 4 7 11 16 12
    14 9 3 8 13
    5 10 6
    1

Line 1 is n; the following n lines are the rows **bottom to top** (the order
of the flat indexing), row k holding ``2*(n - k) + 1`` integers.  Several
triangles in one file are separated by blank lines.
"""

from __future__ import annotations

import csv
import io
import json
import math
import platform
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from functools import singledispatch
from typing import Any, Iterator

from . import __version__, rng
from .annealing import DEFAULTS_VERSION, AnnealOutcome
from .enumeration import CountResult, DistributionTable
from .experiments import FrequencyEstimate, RetryOutcome, StepStats
from .symmetry import CLASS_LABELS
from .triangle import TriangleArrangement, row_length

FORMAT_VERSION = "tri-1"
REPORT_VERSION = 1


class TriParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


def _tokens(line: str) -> Iterator[tuple[int, str]]:
    col = 0
    for tok in line.split():
        col = line.index(tok, col)
        yield col + 1, tok
        col += len(tok)


def _int(tok: str, line: int, col: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise TriParseError(f"not an integer: {tok!r}", line, col) from None


def parse_tri(text: str, first_line: int = 1) -> TriangleArrangement:
    lines = text.rstrip().splitlines()
    while lines and not lines[0].strip():
        lines.pop(0)
        first_line += 1
    if not lines:
        raise TriParseError("empty input")
    header = list(_tokens(lines[0]))
    if len(header) != 1:
        raise TriParseError("first line must hold only the number of levels", first_line)
    col, tok = header[0]
    n = _int(tok, first_line, col)
    if n < 1:
        raise TriParseError(f"number of levels must be positive, got {n}", first_line, col)
    if len(lines) - 1 > n:
        raise TriParseError(f"unexpected text after the {n} rows", first_line + n + 1)
    size = n * n
    entries: list[int] = []
    where: dict[int, tuple[int, int]] = {}
    for k in range(1, n + 1):
        lineno = first_line + k
        if k >= len(lines):
            raise TriParseError(f"expected {n} rows, found {k - 1}", lineno)
        toks = list(_tokens(lines[k]))
        if len(toks) != row_length(n, k):
            raise TriParseError(
                f"row {k} needs {row_length(n, k)} entries, found {len(toks)}", lineno
            )
        for col, tok in toks:
            v = _int(tok, lineno, col)
            if not 1 <= v <= size:
                raise TriParseError(f"value {v} out of range 1..{size}", lineno, col)
            if v in where:
                pl, pc = where[v]
                raise TriParseError(
                    f"duplicate value {v} (first seen at line {pl}, column {pc})",
                    lineno,
                    col,
                )
            where[v] = (lineno, col)
            entries.append(v)
    return TriangleArrangement(n, tuple(entries))


def format_tri(t: TriangleArrangement) -> str:
    out = [str(t.n)]
    out.extend(" ".join(str(v) for v in row) for row in t.rows())
    return "\n".join(out) + "\n"


def iter_tri(text: str) -> Iterator[TriangleArrangement]:
    """Parse a file holding several blank-line separated triangles."""
    block: list[str] = []
    start = 1
    for lineno, line in enumerate(text.splitlines() + [""], start=1):
        if line.strip():
            if not block:
                start = lineno
            block.append(line)
        elif block:
            yield parse_tri("\n".join(block), first_line=start)
            block = []


@dataclass
class RunMetadata:
    subcommand: str
    flags: dict[str, Any]
    seeds: dict[str, int] = field(default_factory=dict)
    started: float = field(default_factory=time.time)
    _t0: float = field(default_factory=time.perf_counter, repr=False)

    def as_dict(self) -> dict[str, Any]:
        return {
            "tool": "magictri",
            "version": __version__,
            "format_version": FORMAT_VERSION,
            "report_version": REPORT_VERSION,
            "anneal_defaults_version": DEFAULTS_VERSION,
            "rng": rng.ALGORITHM,
            "python": platform.python_version(),
            "subcommand": self.subcommand,
            "flags": self.flags,
            "seeds": self.seeds,
            # the only fields allowed to differ between identical runs
            "timing": {
                "timestamp": datetime.fromtimestamp(self.started, timezone.utc).isoformat(),
                "elapsed_s": round(time.perf_counter() - self._t0, 6),
            },
        }


def _clean(x):
    if isinstance(x, float) and math.isnan(x):
        return None
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


@singledispatch
def result_dict(result) -> dict[str, Any]:
    raise TypeError(f"no report schema for {type(result).__name__}")


@result_dict.register
def _(result: CountResult):
    return {"n": result.n, "t_n": result.t_n, "raw": result.raw, "method": result.method}


@result_dict.register
def _(result: DistributionTable):
    return {
        "n": result.n,
        "t_n": result.t_n,
        "rows": [
            dict(integer=v, **dict(zip(CLASS_LABELS, result.row(v))), total=result.total(v))
            for v in sorted(result.counts)
        ],
    }


@result_dict.register
def _(result: StepStats):
    c = result.config
    return {
        "n": result.n,
        "config": {"t0": c.t0, "alpha": c.alpha, "max_steps": c.max_steps},
        "master_seed": result.master_seed,
        "trials": result.trials,
        "successes": result.successes,
        "failures": result.failures,
        "unverified": result.unverified,
        "mean": result.mean,
        "median": result.median,
        "quantiles": result.quantiles(),
    }


@result_dict.register
def _(result: FrequencyEstimate):
    lo, hi = result.interval()
    return {
        "n": result.n,
        "trials": result.trials,
        "hits": result.hits,
        "estimate": result.estimate,
        "interval": [lo, hi],
        "interval_sigma": 3,
    }


@result_dict.register
def _(result: AnnealOutcome):
    c = result.config
    return {
        "n": c.n,
        "seed": c.seed,
        "config": {"t0": c.t0, "alpha": c.alpha, "max_steps": c.max_steps},
        "success": result.success,
        "steps": result.steps,
        "energy": result.energy,
        "entries": list(result.final_entries),
    }


@result_dict.register
def _(result: RetryOutcome):
    d = result_dict(result.outcome)
    d.update(runs=result.runs, total_steps=result.total_steps)
    return d


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _fmt(x):
    if isinstance(x, float):
        return "" if math.isnan(x) else repr(x)
    return x


def step_stats_csv(result: StepStats) -> str:
    """Per-trial rows, a blank line, then a one-row summary table."""
    trials = _csv(
        ["trial", "seed", "steps", "success"],
        ([r.trial, r.seed, r.steps, int(r.success)] for r in result.records),
    )
    q = result.quantiles()
    summary = _csv(
        ["n", "trials", "successes", "failures", "mean", "median", *q],
        [[result.n, result.trials, result.successes, result.failures,
          _fmt(result.mean), _fmt(result.median), *map(_fmt, q.values())]],
    )
    return trials + "\n" + summary


def to_csv(result) -> str:
    if isinstance(result, DistributionTable):
        return _csv(
            ["integer", *CLASS_LABELS, "total"],
            ([v, *result.row(v), result.total(v)] for v in sorted(result.counts)),
        )
    if isinstance(result, StepStats):
        return step_stats_csv(result)
    d = result_dict(result)
    flat = {k: v for k, v in d.items() if not isinstance(v, (dict, list))}
    return _csv(list(flat), [[_fmt(v) for v in flat.values()]])


def to_text(result) -> str:
    if isinstance(result, CountResult):
        return f"T_{result.n} = {result.t_n} (raw {result.raw}, {result.method})\n"
    if isinstance(result, DistributionTable):
        return to_csv(result).replace(",", "\t")
    d = result_dict(result)
    return "".join(
        f"{k}: {v}\n" for k, v in d.items() if not isinstance(v, (dict, list))
    )


def emit_report(result, fmt: str = "json", metadata: RunMetadata | None = None) -> str:
    """Serialise a module result as ``text``, ``csv`` or ``json``."""
    if fmt == "json":
        doc = {"result": _clean(result_dict(result))}
        if metadata is not None:
            doc["metadata"] = metadata.as_dict()
        return json.dumps(doc, indent=2) + "\n"
    if fmt == "csv":
        return to_csv(result)
    if fmt == "text":
        return to_text(result)
    raise ValueError(f"unknown report format {fmt!r}")
