"""Brute-force reference implementations, for testing only.

These deliberately take different routes from the production code:
triple enumeration instead of neighbor intersection, explicit induced
subgraphs instead of counting, Jacobi rotations instead of Lanczos.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .eigen import EigenPairs, fix_signs, magnitude_order
from .errors import ConvergenceError, SizeGuardError
from .graph_core import SparseGraph, induced_subgraph
from .invariants import InvariantVector

BRUTE_MAX_N = 2048
DENSE_MAX_N = 512
JACOBI_MAX_SWEEPS = 100


def _guard(g: SparseGraph, limit: int, what: str) -> None:
    if g.n > limit:
        raise SizeGuardError(f"{what} is limited to n <= {limit}, got n={g.n}")


def dense_adjacency(g: SparseGraph) -> np.ndarray:
    a = np.zeros((g.n, g.n))
    for u in range(g.n):
        for v in g.neighbors(u):
            a[u, v] = 1.0
    return a


def brute_triangles(g: SparseGraph) -> InvariantVector:
    """Enumerate all u < v < w and test the three edges."""
    _guard(g, BRUTE_MAX_N, "brute_triangles")
    a = dense_adjacency(g) > 0
    counts = np.zeros(g.n, dtype=np.int64)
    for u in range(g.n):
        for v in range(u + 1, g.n):
            if not a[u, v]:
                continue
            # innermost loop over w > v, vectorized
            ws = np.arange(v + 1, g.n)[a[u, v + 1:] & a[v, v + 1:]]
            counts[u] += len(ws)
            counts[v] += len(ws)
            counts[ws] += 1
    return InvariantVector("nl3_exact", counts.astype(np.float64))


def brute_scan_statistic(g: SparseGraph) -> InvariantVector:
    """Edge count of the explicitly materialized closed-neighborhood subgraph."""
    _guard(g, BRUTE_MAX_N, "brute_scan_statistic")
    out = np.zeros(g.n)
    for v in range(g.n):
        closed = np.union1d(g.neighbors(v), [v])
        sub, _ = induced_subgraph(g, closed)
        out[v] = sub.m
    return InvariantVector("ss1", out)


@njit(cache=True)
def _jacobi_sweeps(a, vecs, max_sweeps, tol):
    n = a.shape[0]
    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                off += a[p, q] * a[p, q]
        if np.sqrt(2.0 * off) <= tol:
            return sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                for r in range(n):
                    arp = a[r, p]
                    arq = a[r, q]
                    a[r, p] = c * arp - s * arq
                    a[r, q] = s * arp + c * arq
                for r in range(n):
                    apr = a[p, r]
                    aqr = a[q, r]
                    a[p, r] = c * apr - s * aqr
                    a[q, r] = s * apr + c * aqr
                for r in range(n):
                    vrp = vecs[r, p]
                    vrq = vecs[r, q]
                    vecs[r, p] = c * vrp - s * vrq
                    vecs[r, q] = s * vrp + c * vrq
    return -1


def jacobi_eigh(a: np.ndarray, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Row-cyclic Jacobi rotations for a real symmetric matrix.

    Returns ``(values, vectors)`` in no particular order.
    """
    a = np.array(a, dtype=np.float64, copy=True)
    n = a.shape[0]
    vecs = np.eye(n)
    scale = max(1.0, float(np.linalg.norm(a)))
    if _jacobi_sweeps(a, vecs, max_sweeps, 1e-14 * scale) < 0:
        raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")
    return np.diag(a).copy(), vecs


def dense_spectrum(g: SparseGraph) -> EigenPairs:
    """All ``n`` eigenpairs, magnitude-sorted, with the production sign convention."""
    _guard(g, DENSE_MAX_N, "dense_spectrum")
    a = dense_adjacency(g)
    values, vecs = jacobi_eigh(a)
    order = magnitude_order(values)
    values = values[order]
    vecs = fix_signs(vecs[:, order])
    residuals = np.linalg.norm(a @ vecs - vecs * values, axis=0)
    return EigenPairs(values, vecs, residuals)
