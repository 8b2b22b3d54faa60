"""Exact counts and enumerations of magic triangles for n <= 4.

For n = 3 and n = 4 the corners never influence the magic property once the
inner sums are right, so the search runs over the central hexagon (all
non-corner cells) and the three leftover integers go to the corners.

For n = 4 the inner sums are

    h2 = sum(B) + sum(C) + a10 + a14
    p2 = sum(A) + sum(C) + a6 + a10
    q2 = sum(A) + sum(B) + a2 + a10

with A = {a3, a4, a5}, B = {a8, a9, a13}, C = {a11, a12, a15}.  Fixing the
centre a10 and the interior cells a2 < a6 < a14 determines all three group
sums, so the fast search only has to split the remaining integers into
triples with prescribed sums.  :func:`direct_hexagon4_scan` is the slower
cell-by-cell scan kept to check it.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from ._scan import pruned_scan
from .symmetry import (
    CLASS_LABELS,
    GROUP,
    apply_entries,
    canonical_array,
    canonical_entries,
    orbit,
    position_classes,
)
from .triangle import TriangleArrangement, geometry, is_magic_array, magic_constant

log = logging.getLogger(__name__)

GROUP_ORDER = 6
HEX4_EXPANSION = 6**4


@dataclass(frozen=True)
class CountResult:
    n: int
    t_n: int
    raw: int
    method: str


# --- brute force -----------------------------------------------------------


def brute_force_magic(n: int) -> np.ndarray:
    """Every magic arrangement of size ``n`` as rows of a ``(k, n*n)`` array."""
    if not 1 <= n <= 3:
        raise ValueError(f"brute force is only feasible for n <= 3, got n={n}")
    size = n * n
    perms = np.array(list(itertools.permutations(range(1, size + 1))), dtype=np.int8)
    mask = np.zeros(len(perms), dtype=bool)
    chunk = 1 << 16
    for start in range(0, len(perms), chunk):
        mask[start : start + chunk] = is_magic_array(n, perms[start : start + chunk])
    return perms[mask].astype(np.int64)


def verify_free_action(n: int, sample: Iterable[TriangleArrangement]) -> bool:
    """True when every arrangement in ``sample`` has six distinct images."""
    if n < 2:
        return False
    for t in sample:
        if len({o.entries for o in orbit(t)}) != GROUP_ORDER:
            return False
    return True


def brute_force_count(n: int) -> CountResult:
    raw = brute_force_magic(n)
    if n == 1:
        return CountResult(1, len(raw), len(raw), "brute-force")
    sample = (TriangleArrangement(n, tuple(row)) for row in raw)
    if not verify_free_action(n, sample):
        raise AssertionError(f"symmetry group does not act freely for n={n}")
    if len(raw) % GROUP_ORDER:
        raise AssertionError(f"{len(raw)} raw magic triangles is not a multiple of 6")
    return CountResult(n, len(raw) // GROUP_ORDER, len(raw), "brute-force")


def orbit_set(n: int, arrangements: np.ndarray) -> set[tuple[int, ...]]:
    """Canonical forms of a batch, as a set of tuples."""
    return {tuple(int(v) for v in row) for row in canonical_array(n, arrangements)}


# --- n = 2 -----------------------------------------------------------------


def enumerate_2level() -> list[TriangleArrangement]:
    """The four 2-level magic triangles in canonical (lex-min) form."""
    forms = {canonical_entries(2, p) for p in itertools.permutations(range(1, 5))}
    return [TriangleArrangement(2, e) for e in sorted(forms)]


# --- n = 3 -----------------------------------------------------------------

# central-hexagon cells of the 3-level triangle, 1-based
HEX3_CELLS = (2, 3, 4, 6, 7, 8)
CORNERS3 = (1, 5, 9)


@dataclass(frozen=True)
class Hexagon3Solution:
    a2: int
    a3: int
    a4: int
    a6: int
    a7: int
    a8: int

    def values(self) -> tuple[int, ...]:
        return (self.a2, self.a3, self.a4, self.a6, self.a7, self.a8)

    def corners(self) -> tuple[int, int, int]:
        return tuple(sorted(set(range(1, 10)) - set(self.values())))

    def to_triangle(self) -> TriangleArrangement:
        """Fill the corners with the unused integers in increasing order."""
        entries = [0] * 9
        for cell, v in zip(HEX3_CELLS, self.values()):
            entries[cell - 1] = v
        for cell, v in zip(CORNERS3, self.corners()):
            entries[cell - 1] = v
        return TriangleArrangement(3, tuple(entries))


def hexagon3_solutions(ordered: bool = True) -> list[Hexagon3Solution]:
    """Central-hexagon assignments with all three middle lines summing to 15."""
    out = []
    for a2, a3, a4, a6, a7, a8 in itertools.permutations(range(1, 10), 6):
        if a6 + a7 + a8 != 15 or a3 + a4 + a8 != 15 or a2 + a3 + a6 != 15:
            continue
        if ordered and not a3 < a6 < a8:
            continue
        out.append(Hexagon3Solution(a2, a3, a4, a6, a7, a8))
    return out


def enumerate_3level() -> Iterator[TriangleArrangement]:
    """One canonical representative per 3-level magic triangle orbit.

    Each hexagon solution with sorted corners is a distinct orbit; the
    representative yielded is its lex-min form.
    """
    for sol in hexagon3_solutions(ordered=False):
        t = sol.to_triangle()
        yield TriangleArrangement(3, canonical_entries(3, t.entries))


# --- n = 4 -----------------------------------------------------------------

CORNERS4 = (1, 7, 16)
GROUP_A = (3, 4, 5)
GROUP_B = (8, 9, 13)
GROUP_C = (11, 12, 15)
INTERIOR4 = (2, 6, 14)
CENTER4 = 10


@dataclass(frozen=True)
class Hexagon4Solution:
    """A central-hexagon solution in ordered form (groups and interior sorted)."""

    a2: int
    a6: int
    a10: int
    a14: int
    A: tuple[int, int, int]
    B: tuple[int, int, int]
    C: tuple[int, int, int]

    def cells(self) -> dict[int, int]:
        """Value per 1-based cell for the 13 hexagon cells."""
        out = {2: self.a2, 6: self.a6, 10: self.a10, 14: self.a14}
        for cells, vals in ((GROUP_A, self.A), (GROUP_B, self.B), (GROUP_C, self.C)):
            out.update(zip(cells, vals))
        return out

    def corners(self) -> tuple[int, int, int]:
        return tuple(sorted(set(range(1, 17)) - set(self.cells().values())))

    def to_triangle(self) -> TriangleArrangement:
        entries = [0] * 16
        for cell, v in self.cells().items():
            entries[cell - 1] = v
        for cell, v in zip(CORNERS4, self.corners()):
            entries[cell - 1] = v
        return TriangleArrangement(4, tuple(entries))

    @classmethod
    def from_triangle(cls, t: TriangleArrangement) -> "Hexagon4Solution":
        """Ordered form of the hexagon of ``t``.

        Picks the symmetry putting the interior cells in increasing order and
        sorts each group; neither step changes the inner sums.
        """
        if t.n != 4:
            raise ValueError("expected a 4-level triangle")
        for g in GROUP:
            e = apply_entries(4, g, t.entries)
            if e[1] < e[5] < e[13]:
                break

        def grp(cells):
            return tuple(sorted(e[c - 1] for c in cells))

        return cls(e[1], e[5], e[9], e[13], grp(GROUP_A), grp(GROUP_B), grp(GROUP_C))

    def expand(self) -> Iterator[TriangleArrangement]:
        """The 6**4 triangles (corners sorted) sharing this ordered form."""
        base = self.to_triangle().entries
        corner_vals = self.corners()
        seen = set()
        for g in GROUP:
            placed = list(apply_entries(4, g, base))
            for pa in itertools.permutations(self.values_at(placed, GROUP_A)):
                for pb in itertools.permutations(self.values_at(placed, GROUP_B)):
                    for pc in itertools.permutations(self.values_at(placed, GROUP_C)):
                        e = list(placed)
                        for cells, vals in ((GROUP_A, pa), (GROUP_B, pb), (GROUP_C, pc)):
                            for c, v in zip(cells, vals):
                                e[c - 1] = v
                        for c, v in zip(CORNERS4, corner_vals):
                            e[c - 1] = v
                        key = tuple(e)
                        if key not in seen:
                            seen.add(key)
                            yield TriangleArrangement(4, key)

    @staticmethod
    def values_at(entries: Sequence[int], cells: Sequence[int]) -> tuple[int, ...]:
        return tuple(entries[c - 1] for c in cells)


def hexagon4_search_space() -> int:
    """Number of ordered candidate assignments the plain scan would check."""
    return math.comb(16, 13) * math.factorial(13) // 6**4


def _triples_by_sum(values: Sequence[int]) -> dict[int, list[tuple[int, tuple[int, int, int]]]]:
    out: dict[int, list] = defaultdict(list)
    for tri in itertools.combinations(values, 3):
        out[sum(tri)].append(((1 << tri[0]) | (1 << tri[1]) | (1 << tri[2]), tri))
    return out


def iter_hexagon4(centers: Iterable[int] | None = None) -> Iterator[Hexagon4Solution]:
    """Ordered 4-level hexagon solutions via group sums.

    Deterministic order: centre ascending, then interior triple, then A, B, C
    lexicographically.  ``centers`` restricts the centre values (a slice).
    """
    m = magic_constant(4)
    full = set(range(1, 17))
    for a10 in centers if centers is not None else range(1, 17):
        rest10 = sorted(full - {a10})
        for a2, a6, a14 in itertools.combinations(rest10, 3):
            twice = 3 * m - (a2 + a6 + a14) - 3 * a10
            if twice % 2:
                continue
            total = twice // 2
            sa = total - m + a10 + a14
            sb = total - m + a10 + a6
            sc = total - m + a10 + a2
            remaining = [v for v in rest10 if v not in (a2, a6, a14)]
            # only 220 triples; rebuilding the index per interior triple is cheap
            by_sum = _triples_by_sum(remaining)
            for ma, ta in by_sum.get(sa, ()):
                for mb, tb in by_sum.get(sb, ()):
                    if ma & mb:
                        continue
                    mab = ma | mb
                    for mc, tc in by_sum.get(sc, ()):
                        if mab & mc:
                            continue
                        yield Hexagon4Solution(a2, a6, a10, a14, ta, tb, tc)


def _count_slice(center: int) -> int:
    count = sum(1 for _ in iter_hexagon4([center]))
    log.debug("centre %d: %d hexagon solutions", center, count)
    return count


def _run_partitioned(fn, items: Sequence[int], threads: int, pool: str = "process"):
    """Map ``fn`` over ``items``; results come back in item order."""
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    executor = ProcessPoolExecutor if pool == "process" else ThreadPoolExecutor
    with executor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def hexagon4_count(threads: int = 1) -> int:
    counts = _run_partitioned(_count_slice, list(range(1, 17)), threads)
    return sum(counts)


def hexagon4_search(threads: int = 1) -> tuple[int, Iterator[Hexagon4Solution]]:
    """Solution count plus a fresh lazy stream of the same solutions."""
    return hexagon4_count(threads), iter_hexagon4()


# the pruned scan fills cells so that h2 closes first, then p2, then q2
_SCAN_ORDER = (10, 8, 9, 13, 11, 12, 15, 14, 3, 4, 5, 6, 2)


def _scan_tables():
    geo = geometry(4)
    order = np.array([c - 1 for c in _SCAN_ORDER], dtype=np.int64)
    pos = {c: k for k, c in enumerate(_SCAN_ORDER)}
    lower = np.full(len(order), -1, dtype=np.int64)
    upper = np.full(len(order), -1, dtype=np.int64)
    for grp in (GROUP_A, GROUP_B, GROUP_C):
        for a, b in zip(grp, grp[1:]):
            lower[pos[b]] = pos[a]
    # a2 < a6 < a14
    upper[pos[6]] = pos[14]
    upper[pos[2]] = pos[6]
    # inner paired sums: second line plus its partner, straight from geometry
    member = np.zeros((3, len(order)), dtype=np.bool_)
    for f in range(3):
        cells = set(geo.lines[f][1]) | set(geo.lines[f][2])
        for k, c in enumerate(order):
            member[f, k] = c in cells
    closes = np.zeros_like(member)
    for f in range(3):
        last = max(k for k in range(len(order)) if member[f, k])
        closes[f, last] = True
    return order, lower, upper, member, closes


def direct_hexagon4_scan(
    center: int, capacity: int = 0
) -> tuple[int, list[Hexagon4Solution]]:
    """Cell-by-cell pruned scan of the slice with ``a10 == center``.

    Checks the inner sums directly on line cells, independent of the
    group-sum shortcut.  Returns the count and up to ``capacity`` solutions.
    """
    order, lower, upper, member, closes = _scan_tables()
    fixed = np.zeros(len(order), dtype=np.int64)
    fixed[0] = center
    out = np.zeros((capacity, len(order)), dtype=np.int64)
    count = pruned_scan(
        order, lower, upper, fixed, member, closes, magic_constant(4), 16, out
    )
    sols = []
    for row in out[: min(count, capacity)]:
        cells = dict(zip(_SCAN_ORDER, (int(v) for v in row)))
        sols.append(
            Hexagon4Solution(
                cells[2],
                cells[6],
                cells[10],
                cells[14],
                tuple(cells[c] for c in GROUP_A),
                tuple(cells[c] for c in GROUP_B),
                tuple(cells[c] for c in GROUP_C),
            )
        )
    return count, sols


def _direct_count(center: int) -> int:
    return direct_hexagon4_scan(center)[0]


def direct_hexagon4_count(
    centers: Sequence[int] = tuple(range(1, 17)), threads: int = 1
) -> int:
    counts = _run_partitioned(_direct_count, list(centers), threads, pool="thread")
    return sum(counts)


# --- counting and statistics -----------------------------------------------


def count_magic(n: int, threads: int = 1, method: str = "group-sum") -> CountResult:
    """T_n for n <= 4; ``method`` picks the n = 4 hexagon search."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if n == 1:
        return CountResult(1, 1, 1, "closed-form")
    if n == 2:
        return CountResult(2, math.factorial(4) // 6, math.factorial(4), "closed-form")
    if n == 3:
        t = sum(1 for _ in enumerate_3level())
        return CountResult(3, t, GROUP_ORDER * t, "hexagon")
    if n == 4:
        if method == "group-sum":
            hexes = hexagon4_count(threads)
        elif method == "direct":
            hexes = direct_hexagon4_count(threads=threads)
        else:
            raise ValueError(f"unknown search method {method!r}")
        t = hexes * HEX4_EXPANSION
        return CountResult(4, t, GROUP_ORDER * t, f"hexagon/{method}")
    raise ValueError(
        f"exact counting is infeasible for n={n}; only n <= 4 is supported"
    )


def enumerate_magic(n: int) -> Iterator[TriangleArrangement]:
    """Stream canonical representatives, one per orbit (n <= 4)."""
    if n == 1:
        yield TriangleArrangement(1, (1,))
    elif n == 2:
        yield from enumerate_2level()
    elif n == 3:
        yield from enumerate_3level()
    elif n == 4:
        for sol in iter_hexagon4():
            for t in sol.expand():
                yield TriangleArrangement(4, canonical_entries(4, t.entries))
    else:
        raise ValueError(f"enumeration is infeasible for n={n}; only n <= 4 is supported")


@dataclass(frozen=True)
class DistributionTable:
    n: int
    t_n: int
    # counts[v][label] = number of magic triangles (up to symmetry) with v in that class
    counts: dict[int, dict[str, int]]

    def row(self, v: int) -> tuple[int, ...]:
        c = self.counts[v]
        return tuple(c.get(lab, 0) for lab in CLASS_LABELS)

    def total(self, v: int) -> int:
        return sum(self.row(v))


def _tally_hex4(center: int) -> dict[int, dict[str, int]]:
    counts = {v: dict.fromkeys(CLASS_LABELS, 0) for v in range(1, 17)}
    for sol in iter_hexagon4([center]):
        for v in sol.A + sol.B + sol.C:
            counts[v]["border"] += 1
        for v in (sol.a2, sol.a6, sol.a14):
            counts[v]["interior"] += 1
        counts[sol.a10]["center"] += 1
        for v in sol.corners():
            counts[v]["corner"] += 1
    return counts


def distribution(n: int, threads: int = 1) -> DistributionTable:
    """Per-integer class counts over all magic triangles up to symmetry.

    Class totals do not depend on which orbit representative is tallied,
    since every class is a union of cell orbits.
    """
    if n == 3:
        labels = position_classes(3).labels
        counts = {v: dict.fromkeys(CLASS_LABELS, 0) for v in range(1, 10)}
        t_n = 0
        for t in enumerate_3level():
            t_n += 1
            for i, v in enumerate(t.entries):
                counts[v][labels[i]] += 1
        return DistributionTable(3, t_n, counts)
    if n == 4:
        # every ordered solution stands for 6**4 triangles, and both the hexagon
        # placements and the in-group permutations keep each value in its class
        parts = _run_partitioned(_tally_hex4, list(range(1, 17)), threads)
        counts = {v: dict.fromkeys(CLASS_LABELS, 0) for v in range(1, 17)}
        for part in parts:
            for v, c in part.items():
                for lab, k in c.items():
                    counts[v][lab] += k * HEX4_EXPANSION
        t_n = sum(counts[1].values())
        return DistributionTable(4, t_n, counts)
    raise ValueError(f"distribution is only available for n in (3, 4), got n={n}")
