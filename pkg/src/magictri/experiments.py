"""Batch harnesses: annealing step statistics and random-sampling frequencies.

Per-trial (or per-chunk) seeds come from :func:`magictri.rng.derive_seed`
applied to the master seed and the trial (chunk) index, so aggregates do not
depend on how the work is split across workers.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from numba import njit

from . import rng
from .annealing import AnnealConfig, AnnealOutcome, default_config, line_weights, solve
from .triangle import TriangleArrangement, geometry, is_magic, magic_constant

QUANTILES = (0.1, 0.25, 0.5, 0.75, 0.9)
SAMPLE_CHUNK = 1 << 16

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    seed: int
    steps: int
    success: bool


@dataclass(frozen=True)
class StepStats:
    n: int
    config: AnnealConfig
    master_seed: int
    records: tuple[TrialRecord, ...] = field(repr=False)
    unverified: int = 0

    @property
    def trials(self) -> int:
        return len(self.records)

    @property
    def successes(self) -> int:
        return sum(r.success for r in self.records)

    @property
    def failures(self) -> int:
        return self.trials - self.successes

    def success_steps(self) -> np.ndarray:
        return np.array([r.steps for r in self.records if r.success], dtype=np.int64)

    @property
    def mean(self) -> float:
        s = self.success_steps()
        return float(s.mean()) if len(s) else math.nan

    @property
    def median(self) -> float:
        s = self.success_steps()
        return float(np.median(s)) if len(s) else math.nan

    def quantiles(self) -> dict[str, float]:
        s = self.success_steps()
        if not len(s):
            return {f"q{int(q * 100):02d}": math.nan for q in QUANTILES}
        return {f"q{int(q * 100):02d}": float(np.quantile(s, q)) for q in QUANTILES}


def _run_trial(args: tuple[AnnealConfig, int, int]) -> tuple[TrialRecord, bool]:
    config, trial, seed = args
    out = solve(config.with_seed(seed))
    # check independently of the annealer's own bookkeeping
    verified = out.success and is_magic(TriangleArrangement(config.n, out.final_entries))
    return TrialRecord(trial, seed, out.steps, out.success), out.success and not verified


def run_sa_batch(
    n: int,
    trials: int,
    config: AnnealConfig | None = None,
    master_seed: int = 0,
    threads: int = 1,
) -> StepStats:
    """Run ``trials`` independent annealing runs and collect their step counts."""
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    config = config or default_config(n)
    if config.n != n:
        raise ValueError(f"config is for n={config.n}, not n={n}")
    jobs = [(config, k, rng.derive_seed(master_seed, k)) for k in range(trials)]
    every = max(1, trials // 10)
    results = []
    with ThreadPoolExecutor(max_workers=threads) as ex:
        for res in ex.map(_run_trial, jobs):
            results.append(res)
            if len(results) % every == 0:
                log.info("n=%d: %d/%d trials done", n, len(results), trials)
    records = tuple(r for r, _ in results)
    unverified = sum(bad for _, bad in results)
    return StepStats(n, config, master_seed, records, unverified)


@dataclass(frozen=True)
class RetryOutcome:
    outcome: AnnealOutcome
    runs: int
    total_steps: int


def find_with_retries(
    config: AnnealConfig, max_runs: int, master_seed: int = 0
) -> RetryOutcome:
    """Independent runs with derived seeds until one succeeds.

    Reports both the steps of the final run and the total over all runs.
    """
    total = 0
    out = None
    for k in range(max_runs):
        out = solve(config.with_seed(rng.derive_seed(master_seed, k)))
        total += out.steps
        if out.success:
            return RetryOutcome(out, k + 1, total)
    return RetryOutcome(out, max_runs, total)


@dataclass(frozen=True)
class FrequencyEstimate:
    n: int
    trials: int
    hits: int
    seed: int

    @property
    def estimate(self) -> float:
        return self.hits / self.trials

    def interval(self, z: float = 3.0) -> tuple[float, float]:
        """Wilson score interval at ``z`` standard deviations."""
        p = self.estimate
        nt = self.trials
        denom = 1 + z * z / nt
        centre = (p + z * z / (2 * nt)) / denom
        half = z * math.sqrt(p * (1 - p) / nt + z * z / (4 * nt * nt)) / denom
        lo = 0.0 if self.hits == 0 else max(0.0, centre - half)
        hi = 1.0 if self.hits == nt else min(1.0, centre + half)
        return lo, hi


@njit(cache=True, nogil=True)
def _count_hits(trials, state, line_of, pair_of_line, weights, n_pairs, magic):
    size = line_of.shape[1]
    entries = np.arange(1, size + 1).astype(np.int64)
    paired = np.zeros((3, n_pairs), np.int64)
    hits = 0
    for _ in range(trials):
        rng.shuffle(state, entries)
        paired[:, :] = 0
        for f in range(3):
            for i in range(size):
                li = line_of[f, i]
                paired[f, pair_of_line[li]] += entries[i] * weights[li]
        ok = True
        for f in range(3):
            for k in range(n_pairs):
                if paired[f, k] != magic:
                    ok = False
        if ok:
            hits += 1
    return hits


def _sample_chunk(args: tuple[int, int, int, int]) -> int:
    n, seed, chunk, size = args
    g = geometry(n)
    state = rng.new_state(rng.derive_seed(seed, chunk))
    return int(
        _count_hits(
            size,
            state,
            np.ascontiguousarray(g.line_of),
            np.ascontiguousarray(g.pair_of_line),
            line_weights(n),
            g.pairs,
            magic_constant(n),
        )
    )


def random_frequency(
    n: int, trials: int, seed: int = 0, threads: int = 1
) -> FrequencyEstimate:
    """Fraction of uniformly random arrangements that are magic.

    Trials are split into fixed-size chunks, each with its own derived seed,
    so the hit count is the same for any number of workers.
    """
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    jobs = []
    start = 0
    chunk = 0
    while start < trials:
        size = min(SAMPLE_CHUNK, trials - start)
        jobs.append((n, seed, chunk, size))
        start += size
        chunk += 1
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            hits = sum(ex.map(_sample_chunk, jobs))
    else:
        hits = sum(_sample_chunk(j) for j in jobs)
    return FrequencyEstimate(n, trials, hits, seed)


def bound_estimate(n: int, frequency) -> float:
    """Implied number of magic triangles up to symmetry: ``(n**2)! / 6 * frequency``."""
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    return float(Fraction(math.factorial(n * n), 6) * Fraction(frequency))
