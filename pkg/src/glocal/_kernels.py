"""Compiled inner loops for neighbor-intersection counting."""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def edge_support_sums(row_ptr, col_idx, n):
    """For every vertex u, sum over neighbors v of |N(u) & N(v)|.

    Each edge {u, v} (u < v) is visited once and its common-neighbor count
    found by merging the two sorted neighbor lists.
    """
    acc = np.zeros(n, dtype=np.int64)
    for u in range(n):
        a0 = row_ptr[u]
        a1 = row_ptr[u + 1]
        for p in range(a0, a1):
            v = col_idx[p]
            if v <= u:
                continue
            i = a0
            j = row_ptr[v]
            j1 = row_ptr[v + 1]
            t = 0
            while i < a1 and j < j1:
                x = col_idx[i]
                y = col_idx[j]
                if x == y:
                    t += 1
                    i += 1
                    j += 1
                elif x < y:
                    i += 1
                else:
                    j += 1
            acc[u] += t
            acc[v] += t
    return acc


@njit(cache=True, nogil=True)
def forward_triangles(row_ptr, col_idx, n):
    """Per-vertex triangle counts via degree-ordered orientation.

    Edges point from lower to higher (degree, id) rank; each triangle is
    found exactly once from its lowest-ranked vertex by marking that
    vertex's out-neighbors.
    """
    deg = row_ptr[1:] - row_ptr[:-1]
    order = np.argsort(deg * n + np.arange(n), kind="mergesort")
    rank = np.empty(n, dtype=np.int64)
    for r in range(n):
        rank[order[r]] = r

    out_ptr = np.zeros(n + 1, dtype=np.int64)
    for u in range(n):
        c = 0
        for p in range(row_ptr[u], row_ptr[u + 1]):
            if rank[col_idx[p]] > rank[u]:
                c += 1
        out_ptr[u + 1] = out_ptr[u] + c
    out_idx = np.empty(out_ptr[n], dtype=np.int64)
    for u in range(n):
        q = out_ptr[u]
        for p in range(row_ptr[u], row_ptr[u + 1]):
            v = col_idx[p]
            if rank[v] > rank[u]:
                out_idx[q] = v
                q += 1

    counts = np.zeros(n, dtype=np.int64)
    mark = np.zeros(n, dtype=np.bool_)
    for u in range(n):
        for p in range(out_ptr[u], out_ptr[u + 1]):
            mark[out_idx[p]] = True
        for p in range(out_ptr[u], out_ptr[u + 1]):
            v = out_idx[p]
            for q in range(out_ptr[v], out_ptr[v + 1]):
                w = out_idx[q]
                if mark[w]:
                    counts[u] += 1
                    counts[v] += 1
                    counts[w] += 1
        for p in range(out_ptr[u], out_ptr[u + 1]):
            mark[out_idx[p]] = False
    return counts
