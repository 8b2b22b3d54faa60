"""The six rotations and reflections of a triangle acting on arrangements.

A symmetry is a permutation of the three line coordinates ``(r, p, q)``: the
entry sitting in the cell with coordinates ``c`` moves to the cell whose
coordinates are ``(c[axes[0]], c[axes[1]], c[axes[2]])``.  Because the
up/down rule only depends on ``r + p + q``, every coordinate permutation maps
cells to cells and preserves orientation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .triangle import TriangleArrangement, geometry


class SymmetryElement(enum.Enum):
    IDENTITY = (0, 1, 2)
    ROT120 = (1, 2, 0)  # counterclockwise; positive diagonals become rows
    ROT240 = (2, 0, 1)  # clockwise; negative diagonals become rows
    REFLECT = (0, 2, 1)  # across the vertical altitude
    REFLECT_ROT120 = (1, 0, 2)
    REFLECT_ROT240 = (2, 1, 0)

    @property
    def axes(self) -> tuple[int, int, int]:
        return self.value

    def compose(self, other: "SymmetryElement") -> "SymmetryElement":
        """``self ∘ other``: apply ``other`` first."""
        return SymmetryElement(tuple(other.axes[a] for a in self.axes))

    def inverse(self) -> "SymmetryElement":
        inv = [0, 0, 0]
        for i, a in enumerate(self.axes):
            inv[a] = i
        return SymmetryElement(tuple(inv))


GROUP = tuple(SymmetryElement)


@lru_cache(maxsize=None)
def cell_map(n: int, g: SymmetryElement) -> np.ndarray:
    """``dest[i]``: 0-based cell receiving the entry of cell ``i``."""
    geo = geometry(n)
    lookup = {tuple(int(x) for x in c): i for i, c in enumerate(geo.coords)}
    dest = np.array(
        [lookup[tuple(int(c[a]) for a in g.axes)] for c in geo.coords], dtype=np.int64
    )
    dest.setflags(write=False)
    return dest


@lru_cache(maxsize=None)
def gather_map(n: int, g: SymmetryElement) -> np.ndarray:
    """``src[j]``: 0-based cell whose entry lands in cell ``j``."""
    dest = cell_map(n, g)
    src = np.empty_like(dest)
    src[dest] = np.arange(len(dest))
    src.setflags(write=False)
    return src


def apply_entries(n: int, g: SymmetryElement, entries) -> tuple[int, ...]:
    src = gather_map(n, g)
    return tuple(entries[i] for i in src)


def apply(g: SymmetryElement, t: TriangleArrangement) -> TriangleArrangement:
    return TriangleArrangement(t.n, apply_entries(t.n, g, t.entries))


def orbit(t: TriangleArrangement) -> list[TriangleArrangement]:
    """Images of ``t`` under the six group elements, in :data:`GROUP` order."""
    return [apply(g, t) for g in GROUP]


def canonical_entries(n: int, entries) -> tuple[int, ...]:
    return min(apply_entries(n, g, entries) for g in GROUP)


def canonical(t: TriangleArrangement) -> TriangleArrangement:
    """Lexicographically smallest member of the orbit of ``t``."""
    return TriangleArrangement(t.n, canonical_entries(t.n, t.entries))


def canonical_array(n: int, entries: np.ndarray) -> np.ndarray:
    """Row-wise canonical forms of a ``(m, n*n)`` batch."""
    entries = np.asarray(entries)
    images = np.stack([entries[:, gather_map(n, g)] for g in GROUP], axis=1)
    m = entries.shape[0]
    best = images[:, 0].copy()
    for k in range(1, len(GROUP)):
        cand = images[:, k]
        diff = cand != best
        first = np.argmax(diff, axis=1)
        any_diff = diff[np.arange(m), first]
        smaller = any_diff & (cand[np.arange(m), first] < best[np.arange(m), first])
        best[smaller] = cand[smaller]
    return best


CLASS_LABELS = ("corner", "border", "interior", "center")


@dataclass(frozen=True)
class PositionClasses:
    n: int
    # labels[i] is the class of flat index i + 1
    labels: tuple[str, ...]
    # cell orbits as sorted tuples of 1-based indices
    orbits: tuple[tuple[int, ...], ...]

    def members(self, label: str) -> set[int]:
        return {i + 1 for i, lab in enumerate(self.labels) if lab == label}


@lru_cache(maxsize=None)
def cell_orbits(n: int) -> tuple[tuple[int, ...], ...]:
    seen: set[int] = set()
    orbits = []
    for i in range(n * n):
        if i in seen:
            continue
        orb = sorted({int(cell_map(n, g)[i]) for g in GROUP})
        seen.update(orb)
        orbits.append(tuple(j + 1 for j in orb))
    return tuple(orbits)


def position_classes(n: int) -> PositionClasses:
    """Symmetry-invariant position labels.

    The orbit of cell 1 is ``corner``; a one-cell orbit is ``center``; other
    orbits of upward cells touching the outer edge are ``border`` and the rest
    ``interior``.  For n = 4 the down-pointing orbit {4, 9, 11} is counted
    with the border, so that the border is the union of the three groups
    {3, 4, 5}, {8, 9, 13} and {11, 12, 15}.
    """
    geo = geometry(n)
    orbits = cell_orbits(n)
    labels = [""] * (n * n)
    for orb in orbits:
        i = orb[0] - 1
        r, p, q = (int(x) for x in geo.coords[i])
        upward = r + p + q == n + 2
        if 1 in orb:
            lab = "corner"
        elif len(orb) == 1:
            lab = "center"
        elif upward and min(r, p, q) == 1:
            lab = "border"
        else:
            lab = "interior"
        for j in orb:
            labels[j - 1] = lab
    if n == 4:
        for j in (4, 9, 11):
            labels[j - 1] = "border"
    return PositionClasses(n, tuple(labels), orbits)
