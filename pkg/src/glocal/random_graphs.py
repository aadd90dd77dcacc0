"""Random graph generators for tests and benchmarks."""

from __future__ import annotations

import numpy as np

from .graph_core import SparseGraph, from_undirected_pairs


def _pair_from_index(n: int, idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # row i owns the n-1-i pairs (i, j>i); starts[i] = i*(n-1) - i*(i-1)/2
    i = np.arange(n, dtype=np.int64)
    starts = i * (n - 1) - i * (i - 1) // 2
    row = np.searchsorted(starts, idx, side="right") - 1
    col = idx - starts[row] + row + 1
    return row, col


def erdos_renyi(n: int, p: float, seed=None) -> SparseGraph:
    """G(n, p) with each of the n(n-1)/2 pairs present independently.

    Dense regimes draw a uniform per pair; sparse regimes jump between
    successes with geometric gaps, so memory stays O(m).
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    total = n * (n - 1) // 2
    if total == 0 or p == 0.0:
        return from_undirected_pairs(n, np.empty(0, np.int64), np.empty(0, np.int64))
    if p > 0.05 or total < 1_000_000:
        lo_parts, hi_parts = [], []
        # row blocks keep the temporary uniform matrix small
        block = max(1, 4_000_000 // max(n, 1))
        for r0 in range(0, n, block):
            r1 = min(n, r0 + block)
            hit = rng.random((r1 - r0, n)) < p
            rows, cols = np.nonzero(hit)
            rows += r0
            upper = cols > rows
            lo_parts.append(rows[upper])
            hi_parts.append(cols[upper])
        return from_undirected_pairs(n, np.concatenate(lo_parts), np.concatenate(hi_parts))
    idx = []
    pos = -1
    expected = int(total * p + 6 * np.sqrt(total * p) + 16)
    while pos < total:
        gaps = rng.geometric(p, size=expected)
        chunk = pos + np.cumsum(gaps)
        pos = int(chunk[-1])
        idx.append(chunk[chunk < total])
    idx = np.concatenate(idx)
    lo, hi = _pair_from_index(n, idx)
    return from_undirected_pairs(n, lo, hi)


def random_edge_order_list(g: SparseGraph, seed=None, weight=1.0):
    """Shuffled ``(u, v, w)`` arrays with random endpoint orientation."""
    rng = np.random.default_rng(seed)
    e = g.edges()
    e = e[rng.permutation(len(e))]
    flip = rng.random(len(e)) < 0.5
    u = np.where(flip, e[:, 1], e[:, 0])
    v = np.where(flip, e[:, 0], e[:, 1])
    return u, v, np.full(len(e), weight, dtype=np.float64)


def with_isolates(g: SparseGraph, extra: int) -> SparseGraph:
    """Append ``extra`` isolated vertices after the existing ones."""
    e = g.edges()
    return from_undirected_pairs(g.n + extra, e[:, 0], e[:, 1])
