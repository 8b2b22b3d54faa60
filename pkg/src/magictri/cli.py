"""Command-line interface: ``magictri <subcommand> ...``.

Data goes to stdout (or ``--out``); progress and diagnostics go to stderr.
Every error line starts with ``magictri: error:``.  Exit codes: 0 success,
1 negative result (not magic, annealing budget exhausted), 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .annealing import AnnealConfig, default_config, solve
from .enumeration import count_magic, distribution, enumerate_magic
from .experiments import find_with_retries, random_frequency, run_sa_batch
from .formats import (
    FORMAT_VERSION,
    RunMetadata,
    TriParseError,
    emit_report,
    format_tri,
    parse_tri,
    step_stats_csv,
)
from .symmetry import canonical
from .triangle import is_magic, paired_sums

PROG = "magictri"
THREADS_ENV = "MAGICTRI_THREADS"

log = logging.getLogger(PROG)


class CliError(Exception):
    """Invalid input discovered after argument parsing (exit code 2)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{PROG}: error: {self.prog}: {message}\n")


def default_threads() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {v}")
    return v


def _seed(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer seed: {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def _read_tri(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return parse_tri(text)
    except TriParseError as exc:
        raise CliError(f"{path}: {exc}") from None


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as exc:
        raise CliError(f"cannot write {out}: {exc.strerror}") from None


def _flags(args) -> dict:
    skip = {"func", "quiet"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def cmd_verify(args) -> int:
    t = _read_tri(args.file)
    s = paired_sums(t)
    magic = is_magic(t)
    if args.format == "json":
        meta = RunMetadata("verify", _flags(args))
        doc = {
            "result": {
                "n": s.n,
                "magic_constant": s.magic,
                "rows": list(s.rows),
                "posdiags": list(s.posdiags),
                "negdiags": list(s.negdiags),
                "h": list(s.h),
                "p": list(s.p),
                "q": list(s.q),
                "magic": magic,
            },
            "metadata": meta.as_dict(),
        }
        sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    else:
        out = [f"n = {s.n}, magic constant M = {s.magic}"]
        out.append("row sums:          " + " ".join(map(str, s.rows)))
        out.append("positive diagonal: " + " ".join(map(str, s.posdiags)))
        out.append("negative diagonal: " + " ".join(map(str, s.negdiags)))
        for name, fam in s.families().items():
            marks = [
                f"{name}{k} = {v}" + ("" if v == s.magic else f" (target {s.magic})")
                for k, v in enumerate(fam, start=1)
            ]
            out.append(", ".join(marks))
        out.append("magic" if magic else "not magic")
        sys.stdout.write("\n".join(out) + "\n")
    return 0 if magic else 1


def cmd_canon(args) -> int:
    _write(format_tri(canonical(_read_tri(args.file))), None)
    return 0


def _check_small(n: int, what: str) -> None:
    if not 1 <= n <= 4:
        raise CliError(f"{what} is only feasible for 1 <= n <= 4, got n={n}")


def cmd_count(args) -> int:
    _check_small(args.levels, "exact counting")
    meta = RunMetadata("count", _flags(args))
    log.info("counting %d-level magic triangles", args.levels)
    result = count_magic(args.levels, threads=args.threads, method=args.method)
    _write(emit_report(result, args.format, meta), None)
    return 0


def cmd_enumerate(args) -> int:
    _check_small(args.levels, "enumeration")
    emitted = 0
    handle = None
    try:
        handle = open(args.out, "w") if args.out else sys.stdout
    except OSError as exc:
        raise CliError(f"cannot write {args.out}: {exc.strerror}") from None
    try:
        for t in enumerate_magic(args.levels):
            if args.limit is not None and emitted >= args.limit:
                break
            handle.write(("\n" if emitted else "") + format_tri(t))
            emitted += 1
            if emitted % 1_000_000 == 0:
                log.info("%d triangles written", emitted)
    finally:
        if args.out:
            handle.close()
    log.info("%d triangles written", emitted)
    return 0


def cmd_stats(args) -> int:
    if args.levels not in (3, 4):
        raise CliError(f"distribution statistics need n in (3, 4), got n={args.levels}")
    meta = RunMetadata("stats", _flags(args))
    result = distribution(args.levels, threads=args.threads)
    _write(emit_report(result, args.format, meta), args.out)
    return 0


def _anneal_config(args) -> AnnealConfig:
    if args.levels < 2:
        raise CliError(f"annealing needs n >= 2, got n={args.levels}")
    base = default_config(args.levels)
    try:
        return AnnealConfig(
            args.levels,
            args.t0 if args.t0 is not None else base.t0,
            args.alpha if args.alpha is not None else base.alpha,
            args.max_steps if args.max_steps is not None else base.max_steps,
            args.seed,
        )
    except ValueError as exc:
        raise CliError(str(exc)) from None


def cmd_solve(args) -> int:
    config = _anneal_config(args)
    meta = RunMetadata("solve", _flags(args), {"seed": args.seed})
    if args.retries == 1:
        out = solve(config)
        report = out
    else:
        # retries draw their seeds from --seed as a master seed
        report = find_with_retries(config, args.retries, master_seed=args.seed)
        out = report.outcome
    if args.format == "json":
        sys.stdout.write(emit_report(report, "json", meta))
    else:
        sys.stdout.write(f"steps: {out.steps}\n")
        if args.retries > 1:
            sys.stdout.write(f"runs: {report.runs}\ntotal steps: {report.total_steps}\n")
        sys.stdout.write(f"energy: {out.energy}\n")
    if not out.success:
        print(f"{PROG}: no magic triangle within {config.max_steps} steps", file=sys.stderr)
        return 1
    if args.out or args.format == "text":
        _write(format_tri(out.triangle), args.out)
    return 0


def cmd_experiment(args) -> int:
    config = _anneal_config(args)
    meta = RunMetadata("experiment", _flags(args), {"master_seed": args.seed})
    log.info("running %d annealing trials at n=%d", args.trials, args.levels)
    stats = run_sa_batch(
        args.levels, args.trials, config, master_seed=args.seed, threads=args.threads
    )
    if args.out:
        _write(step_stats_csv(stats), args.out)
    sys.stdout.write(emit_report(stats, "json", meta))
    return 0


def cmd_sample(args) -> int:
    meta = RunMetadata("sample", _flags(args), {"seed": args.seed})
    log.info("sampling %d random %d-level arrangements", args.trials, args.levels)
    est = random_frequency(args.levels, args.trials, seed=args.seed, threads=args.threads)
    sys.stdout.write(emit_report(est, "json", meta))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog=PROG, description="Verify, count, enumerate and search for magic triangles."
    )
    parser.add_argument(
        "--version",
        action="version",
        version=f"{PROG} {__version__} (triangle format {FORMAT_VERSION})",
    )
    common = _Parser(add_help=False)
    common.add_argument(
        "--threads",
        type=_positive,
        default=default_threads(),
        help=f"worker count (default: ${THREADS_ENV} or CPU count); never changes results",
    )
    common.add_argument("-q", "--quiet", action="store_true", help="suppress progress")
    sub = parser.add_subparsers(dest="command", required=True, metavar="SUBCOMMAND")

    p = sub.add_parser("verify", parents=[common], help="check the magic property of a .tri file")
    p.add_argument("file")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("canon", parents=[common], help="print the canonical form of a .tri file")
    p.add_argument("file")
    p.set_defaults(func=cmd_canon)

    p = sub.add_parser("count", parents=[common], help="exact T_n for n <= 4")
    p.add_argument("--levels", type=_positive, required=True)
    p.add_argument("--format", choices=("json", "text", "csv"), default="json")
    p.add_argument(
        "--method",
        choices=("group-sum", "direct"),
        default="group-sum",
        help="n=4 search: group sums (fast) or the cell-by-cell pruned scan",
    )
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("enumerate", parents=[common], help="stream canonical magic triangles")
    p.add_argument("--levels", type=_positive, required=True)
    p.add_argument("--out")
    p.add_argument("--limit", type=_positive)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("stats", parents=[common], help="integer distribution by position class")
    p.add_argument("--levels", type=_positive, required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_stats)

    def anneal_flags(p):
        p.add_argument("--levels", type=_positive, required=True)
        p.add_argument("--seed", type=_seed, default=0)
        p.add_argument("--t0", type=float)
        p.add_argument("--alpha", type=float)
        p.add_argument("--max-steps", type=_positive)

    p = sub.add_parser("solve", parents=[common], help="find one magic triangle by annealing")
    anneal_flags(p)
    p.add_argument("--retries", type=_positive, default=1, help="independent runs to try")
    p.add_argument("--out", help="write the triangle here (.tri)")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("experiment", parents=[common], help="annealing step statistics")
    anneal_flags(p)
    p.add_argument("--trials", type=_positive, default=1000)
    p.add_argument("--out", help="per-trial CSV (trial,seed,steps,success)")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("sample", parents=[common], help="frequency of magic among random arrangements")
    p.add_argument("--levels", type=_positive, required=True)
    p.add_argument("--trials", type=_positive, default=1_000_000)
    p.add_argument("--seed", type=_seed, default=0)
    p.set_defaults(func=cmd_sample)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format=f"{PROG}: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except CliError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
