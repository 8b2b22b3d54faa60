"""Seedable, platform-independent random numbers.

The stream generator is xoshiro256** seeded through splitmix64, exactly as
recommended by its authors.  The jitted functions operate on a 4-word uint64
state array and are callable both from Python and from other jitted code, so
the reference step and the fast kernel draw identical streams.
"""

from __future__ import annotations

import numpy as np
from numba import njit

ALGORITHM = "xoshiro256**/splitmix64"

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(state: int) -> tuple[int, int]:
    """One splitmix64 step: returns ``(new_state, output)``."""
    state = (state + GOLDEN) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


def derive_seed(master: int, index: int) -> int:
    """Seed of sub-stream ``index``: the ``index``-th splitmix64 output from ``master``.

    Independent of how work is partitioned, so batch results do not depend on
    the number of workers.
    """
    state = (master + index * GOLDEN) & MASK64
    return splitmix64(state)[1]


def new_state(seed: int) -> np.ndarray:
    s = np.empty(4, dtype=np.uint64)
    state = seed & MASK64
    for k in range(4):
        state, out = splitmix64(state)
        s[k] = out
    return s


@njit(cache=True, nogil=True)
def _rotl(x, k):
    return (x << np.uint64(k)) | (x >> np.uint64(64 - k))


@njit(cache=True, nogil=True)
def next_u64(s):
    s0, s1, s2, s3 = s[0], s[1], s[2], s[3]
    result = _rotl(s1 * np.uint64(5), 7) * np.uint64(9)
    t = s1 << np.uint64(17)
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s3 = _rotl(s3, 45)
    s[0], s[1], s[2], s[3] = s0, s1, s2, s3
    return result


@njit(cache=True, nogil=True)
def next_float(s):
    """Uniform double in [0, 1) from the top 53 bits."""
    return np.float64(next_u64(s) >> np.uint64(11)) * (1.0 / 9007199254740992.0)


@njit(cache=True, nogil=True)
def randbelow(s, bound):
    """Unbiased integer in ``[0, bound)`` by rejection."""
    b = np.uint64(bound)
    threshold = (np.uint64(0) - b) % b
    while True:
        r = next_u64(s)
        if r >= threshold:
            return np.int64(r % b)


@njit(cache=True, nogil=True)
def shuffle(s, arr):
    """In-place Fisher-Yates shuffle."""
    for i in range(len(arr) - 1, 0, -1):
        j = randbelow(s, i + 1)
        arr[i], arr[j] = arr[j], arr[i]
