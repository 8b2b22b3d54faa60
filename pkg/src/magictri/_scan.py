"""Pruned depth-first scan over assignments of values to a fixed list of cells."""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def pruned_scan(
    order, lower, upper, fixed, member, closes, target, max_value, out
):
    """Count assignments of distinct values in ``1..max_value`` to ``order``.

    ``lower[k]``/``upper[k]`` name an earlier depth whose value must be
    smaller/larger than the value at depth ``k`` (-1 for none).  ``fixed[k]``
    pins depth ``k`` to one value (0 for free).  ``member[f, k]`` says whether
    the cell at depth ``k`` belongs to sum ``f``; ``closes[f, k]`` marks the
    depth at which sum ``f`` becomes complete and must equal ``target``.
    Partial sums above ``target`` are abandoned.  Solutions are written to
    ``out`` while it has room; the total count is returned regardless.
    """
    depth_max = order.shape[0]
    nf = member.shape[0]
    val = np.zeros(depth_max, np.int64)
    nxt = np.zeros(depth_max, np.int64)
    placed = np.zeros(depth_max, np.bool_)
    sums = np.zeros(nf, np.int64)
    used = np.zeros(max_value + 1, np.bool_)
    count = 0
    depth = 0
    nxt[0] = fixed[0] if fixed[0] > 0 else 1
    while depth >= 0:
        if placed[depth]:
            v = val[depth]
            used[v] = False
            for f in range(nf):
                if member[f, depth]:
                    sums[f] -= v
            placed[depth] = False
        v = nxt[depth]
        hi = max_value
        if fixed[depth] > 0:
            if v > fixed[depth]:
                v = max_value + 1
            hi = fixed[depth]
        if lower[depth] >= 0 and v <= val[lower[depth]]:
            v = val[lower[depth]] + 1
        if upper[depth] >= 0 and hi >= val[upper[depth]]:
            hi = val[upper[depth]] - 1
        found = False
        while v <= hi:
            if used[v]:
                v += 1
                continue
            over = False
            ok = True
            for f in range(nf):
                if member[f, depth]:
                    s = sums[f] + v
                    if s > target:
                        over = True
                    elif closes[f, depth] and s != target:
                        ok = False
            if over:
                # sums only grow with v
                break
            if ok:
                found = True
                break
            v += 1
        if not found:
            depth -= 1
            continue
        val[depth] = v
        nxt[depth] = v + 1
        used[v] = True
        for f in range(nf):
            if member[f, depth]:
                sums[f] += v
        placed[depth] = True
        if depth == depth_max - 1:
            if count < out.shape[0]:
                out[count, :] = val
            count += 1
            continue
        depth += 1
        nxt[depth] = fixed[depth] if fixed[depth] > 0 else 1
        placed[depth] = False
    return count
