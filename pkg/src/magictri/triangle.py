"""Triangular arrangements, their coordinates and line sums.

Cells of an n-level triangle are indexed 1..n**2 left-to-right, bottom-to-top.
Row r (1 = bottom) holds ``2*(n - r) + 1`` cells; odd positions point up,
even positions point down.

Every cell also lies on one positive-slope diagonal ``p`` (numbered from the
left edge) and one negative-slope diagonal ``q`` (numbered from the right
edge).  With this numbering ``r + p + q`` is ``n + 2`` for upward cells and
``n + 1`` for downward cells, so the three line families are symmetric under
cyclic permutation of ``(r, p, q)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

FAMILIES = ("row", "posdiag", "negdiag")


def magic_constant(n: int) -> int:
    """Target value ``n * (n**2 + 1)`` shared by every paired line sum."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return n * (n * n + 1)


def row_length(n: int, row: int) -> int:
    return 2 * (n - row) + 1


def _check_n(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")


@dataclass(frozen=True)
class CellCoord:
    row: int
    pos: int

    @property
    def upward(self) -> bool:
        return self.pos % 2 == 1


@dataclass(frozen=True)
class LineCoord:
    r: int
    p: int
    q: int


def _row_start(n: int, row: int) -> int:
    # number of cells strictly below `row`
    return sum(row_length(n, j) for j in range(1, row))


def index_of_coord(n: int, c: CellCoord) -> int:
    _check_n(n)
    if not 1 <= c.row <= n or not 1 <= c.pos <= row_length(n, c.row):
        raise ValueError(f"cell {c} is not in a {n}-level triangle")
    return _row_start(n, c.row) + c.pos


def coord_of_index(n: int, i: int) -> CellCoord:
    """Row and position of flat index ``i`` (1-based)."""
    _check_n(n)
    if not 1 <= i <= n * n:
        raise ValueError(f"index {i} out of range 1..{n * n}")
    row = 1
    rest = i
    while rest > row_length(n, row):
        rest -= row_length(n, row)
        row += 1
    return CellCoord(row, rest)


def line_coord(n: int, c: CellCoord) -> LineCoord:
    _check_n(n)
    if not 1 <= c.row <= n or not 1 <= c.pos <= row_length(n, c.row):
        raise ValueError(f"cell {c} is not in a {n}-level triangle")
    p = (c.pos + 1) // 2
    q = (n + 2 if c.upward else n + 1) - c.row - p
    return LineCoord(c.row, p, q)


def coord_of_line(n: int, lc: LineCoord) -> CellCoord:
    """Inverse of :func:`line_coord`."""
    s = lc.r + lc.p + lc.q
    if s == n + 2:
        pos = 2 * lc.p - 1
    elif s == n + 1:
        pos = 2 * lc.p
    else:
        raise ValueError(f"{lc} is not a cell of a {n}-level triangle")
    c = CellCoord(lc.r, pos)
    if not 1 <= lc.r <= n or not 1 <= pos <= row_length(n, lc.r):
        raise ValueError(f"{lc} is not a cell of a {n}-level triangle")
    return c


@dataclass(frozen=True)
class Geometry:
    """Precomputed per-n index tables (0-based, read-only)."""

    n: int
    # coords[i] = (r, p, q) of flat index i + 1
    coords: np.ndarray
    # line_of[f, i] = 0-based line number of cell i in family f
    line_of: np.ndarray
    # lines[f][k] = 0-based cell indices of line k + 1 in family f
    lines: tuple
    # pair_of_line[k] = 0-based paired-sum slot of line k + 1
    pair_of_line: np.ndarray
    # incidence[f] is an (n, n*n) 0/1 matrix of line membership
    incidence: np.ndarray

    @property
    def cells(self) -> int:
        return self.n * self.n

    @property
    def pairs(self) -> int:
        return (self.n + 1) // 2


@lru_cache(maxsize=None)
def geometry(n: int) -> Geometry:
    _check_n(n)
    n = int(n)
    coords = np.empty((n * n, 3), dtype=np.int64)
    for i in range(n * n):
        lc = line_coord(n, coord_of_index(n, i + 1))
        coords[i] = (lc.r, lc.p, lc.q)
    line_of = (coords.T - 1).copy()
    lines = tuple(
        tuple(tuple(int(i) for i in np.flatnonzero(line_of[f] == k)) for k in range(n))
        for f in range(3)
    )
    pair_of_line = np.array([min(k, n - 1 - k) for k in range(n)], dtype=np.int64)
    incidence = np.zeros((3, n, n * n), dtype=np.int64)
    for f in range(3):
        incidence[f, line_of[f], np.arange(n * n)] = 1
    for arr in (coords, line_of, pair_of_line, incidence):
        arr.setflags(write=False)
    return Geometry(n, coords, line_of, lines, pair_of_line, incidence)


def cells_of_line(n: int, family: str, k: int) -> list[int]:
    """Flat indices (1-based) of line ``k`` in ``family``."""
    if family not in FAMILIES:
        raise ValueError(f"family must be one of {FAMILIES}, got {family!r}")
    _check_n(n)
    if not 1 <= k <= n:
        raise ValueError(f"line number {k} out of range 1..{n}")
    return [i + 1 for i in geometry(n).lines[FAMILIES.index(family)][k - 1]]


def _permutation_problem(n: int, entries: Sequence[int]) -> str | None:
    size = n * n
    if len(entries) != size:
        return f"expected {size} entries for n={n}, got {len(entries)}"
    seen: set[int] = set()
    for v in entries:
        if not 1 <= v <= size:
            return f"value {v} out of range 1..{size}"
        if v in seen:
            return f"duplicate value {v}"
        seen.add(v)
    return None


@dataclass(frozen=True)
class TriangleArrangement:
    """An n-level triangle holding a permutation of ``1..n**2``.

    ``entries[i]`` is the value at flat index ``i + 1``.
    """

    n: int
    entries: tuple[int, ...]

    def __post_init__(self):
        _check_n(self.n)
        entries = tuple(int(v) for v in self.entries)
        object.__setattr__(self, "entries", entries)
        problem = _permutation_problem(self.n, entries)
        if problem is not None:
            raise ValueError(problem)

    @classmethod
    def from_entries(cls, entries: Iterable[int]) -> "TriangleArrangement":
        entries = tuple(entries)
        n = int(round(len(entries) ** 0.5))
        if n * n != len(entries):
            raise ValueError(f"{len(entries)} entries is not a perfect square")
        return cls(n, entries)

    @classmethod
    def identity(cls, n: int) -> "TriangleArrangement":
        return cls(n, tuple(range(1, n * n + 1)))

    def __getitem__(self, i: int) -> int:
        """Value at 1-based flat index ``i``."""
        if not 1 <= i <= len(self.entries):
            raise IndexError(i)
        return self.entries[i - 1]

    def rows(self) -> list[tuple[int, ...]]:
        """Entries grouped by row, bottom row first."""
        out = []
        start = 0
        for r in range(1, self.n + 1):
            m = row_length(self.n, r)
            out.append(self.entries[start : start + m])
            start += m
        return out


@dataclass(frozen=True)
class PairedSums:
    n: int
    magic: int
    rows: tuple[int, ...]
    posdiags: tuple[int, ...]
    negdiags: tuple[int, ...]
    h: tuple[int, ...]
    p: tuple[int, ...]
    q: tuple[int, ...]

    def families(self) -> dict[str, tuple[int, ...]]:
        return {"h": self.h, "p": self.p, "q": self.q}


def _pair(line_sums: Sequence[int]) -> tuple[int, ...]:
    n = len(line_sums)
    # line k pairs with line n + 1 - k; the middle line of odd n pairs with itself
    return tuple(line_sums[k] + line_sums[n - 1 - k] for k in range((n + 1) // 2))


def line_sums(t: TriangleArrangement) -> tuple[tuple[int, ...], ...]:
    g = geometry(t.n)
    return tuple(
        tuple(sum(t.entries[i] for i in line) for line in g.lines[f]) for f in range(3)
    )


def paired_sums(t: TriangleArrangement) -> PairedSums:
    rows, pos, neg = line_sums(t)
    return PairedSums(
        n=t.n,
        magic=magic_constant(t.n),
        rows=rows,
        posdiags=pos,
        negdiags=neg,
        h=_pair(rows),
        p=_pair(pos),
        q=_pair(neg),
    )


def is_magic(t: TriangleArrangement) -> bool:
    s = paired_sums(t)
    return all(v == s.magic for fam in (s.h, s.p, s.q) for v in fam)


def paired_sums_array(n: int, entries: np.ndarray) -> np.ndarray:
    """Vectorised paired sums for a batch of arrangements.

    ``entries`` has shape ``(m, n*n)``; the result has shape
    ``(m, 3, ceil(n/2))`` with families ordered h, p, q.
    """
    g = geometry(n)
    entries = np.asarray(entries, dtype=np.int64)
    sums = np.einsum("fki,mi->mfk", g.incidence, entries)
    half = g.pairs
    return sums[:, :, :half] + sums[:, :, ::-1][:, :, :half]


def is_magic_array(n: int, entries: np.ndarray) -> np.ndarray:
    """Boolean mask of magic rows in a ``(m, n*n)`` batch."""
    return np.all(paired_sums_array(n, entries) == magic_constant(n), axis=(1, 2))
