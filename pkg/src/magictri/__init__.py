"""Magic triangles: arrangements of 1..n**2 in an n-level triangle whose
paired row and diagonal sums all equal n(n**2 + 1)."""

__version__ = "0.1.0"

from .symmetry import SymmetryElement, apply, canonical, orbit, position_classes
from .triangle import (
    TriangleArrangement,
    cells_of_line,
    coord_of_index,
    is_magic,
    line_coord,
    magic_constant,
    paired_sums,
)

__all__ = [
    "SymmetryElement",
    "TriangleArrangement",
    "apply",
    "canonical",
    "cells_of_line",
    "coord_of_index",
    "is_magic",
    "line_coord",
    "magic_constant",
    "orbit",
    "paired_sums",
    "position_classes",
]
