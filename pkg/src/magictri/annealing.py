"""Simulated annealing search for magic triangles.

Energy is the L1 distance of every paired sum from the magic constant.  A
step proposes swapping two distinct cells chosen uniformly at random.  Swaps
that do not raise the energy are always taken; a swap raising it by ``dE`` at
step ``j`` is taken with probability ``exp(-dE / (t0 * alpha**j))``.

The search loop runs as a numba kernel.  :func:`anneal_step` is a plain
Python version of a single step that draws the same random numbers, used to
check the kernel and to inspect trajectories.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from . import rng
from .triangle import (
    TriangleArrangement,
    geometry,
    is_magic,
    magic_constant,
    paired_sums,
)


@dataclass(frozen=True)
class AnnealConfig:
    n: int
    t0: float
    alpha: float
    max_steps: int
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        if not self.t0 > 0:
            raise ValueError(f"t0 must be positive, got {self.t0}")
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.max_steps < 1:
            raise ValueError(f"max_steps must be at least 1, got {self.max_steps}")

    def with_seed(self, seed: int) -> "AnnealConfig":
        return AnnealConfig(self.n, self.t0, self.alpha, self.max_steps, seed)


@dataclass(frozen=True)
class AnnealOutcome:
    config: AnnealConfig
    triangle: TriangleArrangement | None
    steps: int
    energy: int
    final_entries: tuple[int, ...] = field(repr=False, default=())

    @property
    def success(self) -> bool:
        return self.triangle is not None


# Tuned per-n defaults (t0, alpha, max_steps), table version 1.  Temperatures
# are in energy units; alpha is applied once per proposed swap.  Low, slowly
# decaying temperatures worked best for every n from 3 to 10.
DEFAULTS_VERSION = 1
_DEFAULTS: dict[int, tuple[float, float, int]] = {
    2: (1.0, 0.99999999, 1_000),
    3: (1.5, 0.99999999, 100_000),
    4: (1.0, 0.99999999, 1_000_000),
    5: (1.0, 0.99999999, 10_000_000),
    6: (1.0, 0.99999999, 10_000_000),
    7: (1.0, 0.99999999, 50_000_000),
    8: (1.25, 0.99999999, 100_000_000),
    9: (1.0, 0.99999999, 200_000_000),
    10: (1.0, 0.99999999, 500_000_000),
}


def default_config(n: int, seed: int = 0) -> AnnealConfig:
    """Shipped parameters for ``n``; sizes beyond the table reuse the largest entry."""
    if n < 2:
        raise ValueError(f"no annealing defaults for n={n}")
    t0, alpha, steps = _DEFAULTS[min(n, max(_DEFAULTS))]
    return AnnealConfig(n, t0, alpha, steps, seed)


def energy(t: TriangleArrangement) -> int:
    s = paired_sums(t)
    return sum(abs(v - s.magic) for fam in (s.h, s.p, s.q) for v in fam)


def line_weights(n: int) -> np.ndarray:
    # the middle line of odd n is paired with itself, so it counts twice
    return np.array([2 if k == n - 1 - k else 1 for k in range(n)], dtype=np.int64)


@dataclass
class AnnealState:
    """Mutable search state for the step-by-step reference path."""

    n: int
    t0: float
    alpha: float
    entries: np.ndarray
    paired: np.ndarray  # (3, ceil(n/2)) current paired sums
    energy: int
    rng_state: np.ndarray
    step: int = 0
    temperature: float = 0.0

    @classmethod
    def start(cls, config: AnnealConfig) -> "AnnealState":
        s = rng.new_state(config.seed)
        entries = np.arange(1, config.n * config.n + 1, dtype=np.int64)
        rng.shuffle(s, entries)
        paired = _initial_paired(config.n, entries)
        e = int(np.abs(paired - magic_constant(config.n)).sum())
        return cls(
            config.n, config.t0, config.alpha, entries, paired, e, s, 0, config.t0
        )

    def triangle(self) -> TriangleArrangement:
        return TriangleArrangement(self.n, tuple(int(v) for v in self.entries))


def _initial_paired(n: int, entries: np.ndarray) -> np.ndarray:
    g = geometry(n)
    sums = g.incidence @ entries  # (3, n)
    half = g.pairs
    return (sums[:, :half] + sums[:, ::-1][:, :half]).astype(np.int64)


def swap_delta(state: AnnealState, i: int, j: int) -> int:
    """Energy change from swapping 0-based cells ``i`` and ``j``, touching only their lines."""
    g = geometry(state.n)
    w = line_weights(state.n)
    m = magic_constant(state.n)
    d = int(state.entries[j] - state.entries[i])
    de = 0
    for f in range(3):
        li, lj = int(g.line_of[f, i]), int(g.line_of[f, j])
        pi, pj = int(g.pair_of_line[li]), int(g.pair_of_line[lj])
        if pi == pj:
            continue
        a = int(state.paired[f, pi])
        b = int(state.paired[f, pj])
        de += abs(a + d * w[li] - m) - abs(a - m)
        de += abs(b - d * w[lj] - m) - abs(b - m)
    return de


def _apply_swap(state: AnnealState, i: int, j: int) -> None:
    g = geometry(state.n)
    w = line_weights(state.n)
    d = int(state.entries[j] - state.entries[i])
    for f in range(3):
        li, lj = int(g.line_of[f, i]), int(g.line_of[f, j])
        state.paired[f, g.pair_of_line[li]] += d * w[li]
        state.paired[f, g.pair_of_line[lj]] -= d * w[lj]
    state.entries[i], state.entries[j] = state.entries[j], state.entries[i]


def accept_probability(de: int, t0: float, alpha: float, step: int) -> float:
    if de <= 0:
        return 1.0
    temp = t0 * alpha**step
    if temp <= 0.0:
        return 0.0
    return math.exp(-de / temp)


def anneal_step(state: AnnealState) -> tuple[int, int, bool]:
    """Propose and maybe perform one swap; returns ``(i, j, accepted)``."""
    size = state.n * state.n
    i = int(rng.randbelow(state.rng_state, size))
    j = int(rng.randbelow(state.rng_state, size - 1))
    if j >= i:
        j += 1
    de = swap_delta(state, i, j)
    if de <= 0:
        accepted = True
    elif state.temperature > 0.0:
        accepted = rng.next_float(state.rng_state) < math.exp(-de / state.temperature)
    else:
        accepted = False
    if accepted:
        _apply_swap(state, i, j)
        state.energy += de
    state.step += 1
    state.temperature *= state.alpha
    return i, j, accepted


@njit(cache=True, nogil=True)
def _anneal_kernel(
    entries, line_of, pair_of_line, weights, paired, magic, t0, alpha, max_steps, s
):
    size = entries.shape[0]
    e = 0
    for f in range(paired.shape[0]):
        for k in range(paired.shape[1]):
            e += abs(paired[f, k] - magic)
    temp = t0
    step = 0
    while e > 0 and step < max_steps:
        i = rng.randbelow(s, size)
        j = rng.randbelow(s, size - 1)
        if j >= i:
            j += 1
        d = entries[j] - entries[i]
        de = 0
        for f in range(3):
            li = line_of[f, i]
            lj = line_of[f, j]
            pi = pair_of_line[li]
            pj = pair_of_line[lj]
            if pi != pj:
                a = paired[f, pi]
                b = paired[f, pj]
                de += abs(a + d * weights[li] - magic) - abs(a - magic)
                de += abs(b - d * weights[lj] - magic) - abs(b - magic)
        if de <= 0:
            accept = True
        elif temp > 0.0:
            accept = rng.next_float(s) < np.exp(-de / temp)
        else:
            accept = False
        if accept:
            for f in range(3):
                li = line_of[f, i]
                lj = line_of[f, j]
                paired[f, pair_of_line[li]] += d * weights[li]
                paired[f, pair_of_line[lj]] -= d * weights[lj]
            tmp = entries[i]
            entries[i] = entries[j]
            entries[j] = tmp
            e += de
        step += 1
        temp *= alpha
    return step, e


def solve(config: AnnealConfig) -> AnnealOutcome:
    """Anneal from a seeded random start until magic or out of budget.

    ``steps`` counts every proposed swap, accepted or not.  Exhausting the
    budget is reported as an unsuccessful outcome, not an exception.
    """
    state = AnnealState.start(config)
    g = geometry(config.n)
    steps, e = _anneal_kernel(
        state.entries,
        np.ascontiguousarray(g.line_of),
        np.ascontiguousarray(g.pair_of_line),
        line_weights(config.n),
        state.paired,
        magic_constant(config.n),
        float(config.t0),
        float(config.alpha),
        int(config.max_steps),
        state.rng_state,
    )
    final = tuple(int(v) for v in state.entries)
    tri = None
    if e == 0:
        tri = TriangleArrangement(config.n, final)
        if not is_magic(tri):
            raise AssertionError("annealer reported zero energy for a non-magic triangle")
    return AnnealOutcome(config, tri, int(steps), int(e), final)
