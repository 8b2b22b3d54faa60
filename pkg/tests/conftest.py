import math

import numpy as np
import pytest

from magictri.triangle import TriangleArrangement

H = math.sqrt(3) / 2

P16 = (2, 15, 4, 7, 11, 16, 12, 14, 9, 3, 8, 13, 5, 10, 6, 1)


@pytest.fixture
def p16():
    return TriangleArrangement(4, P16)


@pytest.fixture
def i9():
    return TriangleArrangement.identity(3)


def centroids(n):
    """Plane centroids of the n*n unit subtriangles in flat index order.

    The big triangle has corners (0, 0), (n, 0) and (n/2, n*H).
    """
    pts = []
    for r in range(1, n + 1):
        x0 = (r - 1) / 2
        y0 = (r - 1) * H
        for pos in range(1, 2 * (n - r) + 2):
            k = (pos + 1) // 2
            if pos % 2:
                pts.append((x0 + k - 0.5, y0 + H / 3))
            else:
                pts.append((x0 + k, y0 + 2 * H / 3))
    return np.array(pts)


def geometric_lines(n):
    """Line numbers per cell from plane geometry.

    Rows are horizontal bands; positive-slope bands are counted from the left
    edge x = y/sqrt(3), negative-slope bands from the right edge.
    """
    c = centroids(n)
    x, y = c[:, 0], c[:, 1]
    rows = np.floor(y / H).astype(int) + 1
    pos = np.floor(x - y / math.sqrt(3)).astype(int) + 1
    neg = np.floor(n - x - y / math.sqrt(3)).astype(int) + 1
    return rows, pos, neg


def geometric_cell_map(n, angle_deg=0.0, reflect=False):
    """dest[i]: cell whose centroid is the image of cell i's centroid.

    Reflection (across the vertical altitude) is applied before rotation.
    Positive angles are counterclockwise.
    """
    c = centroids(n)
    centre = np.array([n / 2, n * H / 3])
    p = c - centre
    if reflect:
        p = p * np.array([-1, 1])
    a = math.radians(angle_deg)
    rot = np.array([[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]])
    q = p @ rot.T + centre
    d = np.linalg.norm(q[:, None, :] - c[None, :, :], axis=2)
    dest = d.argmin(axis=1)
    assert np.all(d.min(axis=1) < 1e-9)
    return dest


def random_triangle(rng, n):
    return TriangleArrangement(n, tuple(int(v) for v in rng.permutation(n * n) + 1))


# --- acceptance reporting --------------------------------------------------

ACCEPTANCE: dict[str, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k.split()[0])):
        terminalreporter.write_line(f"criterion {key}: {ACCEPTANCE[key]}")
