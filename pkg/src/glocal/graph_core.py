"""Immutable symmetric binary adjacency in CSR form.

Raw weighted input is accumulated per unordered vertex pair, thresholded
(strictly: an edge survives iff its summed weight exceeds the threshold),
binarized and stored in both directions with sorted neighbor lists.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import InputError


@dataclass(frozen=True, eq=False)
class WeightedEdgeList:
    """Columnar weighted edge list; duplicates and reciprocal entries allowed."""

    n: int
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "src", np.asarray(self.src, dtype=np.int64))
        object.__setattr__(self, "dst", np.asarray(self.dst, dtype=np.int64))
        object.__setattr__(self, "weight", np.asarray(self.weight, dtype=np.float64))
        if not (len(self.src) == len(self.dst) == len(self.weight)):
            raise InputError("src, dst and weight must have equal length")

    @classmethod
    def from_tuples(cls, n: int, edges: Iterable[Sequence]) -> "WeightedEdgeList":
        """Build from ``(u, v)`` or ``(u, v, w)`` tuples; missing weights are 1."""
        src, dst, weight = [], [], []
        for e in edges:
            src.append(e[0])
            dst.append(e[1])
            weight.append(e[2] if len(e) > 2 else 1.0)
        return cls(n, src, dst, weight)

    def __len__(self):
        return len(self.src)

    def tuples(self):
        return [(int(u), int(v), float(w)) for u, v, w in zip(self.src, self.dst, self.weight)]


@dataclass(frozen=True, eq=False)
class SparseGraph:
    """Simple undirected graph; each undirected edge is stored twice.

    ``col_idx[row_ptr[u]:row_ptr[u + 1]]`` are the neighbors of ``u`` in
    strictly increasing order.
    """

    n: int
    row_ptr: np.ndarray
    col_idx: np.ndarray

    def __post_init__(self):
        row_ptr = np.ascontiguousarray(self.row_ptr, dtype=np.int64)
        col_idx = np.ascontiguousarray(self.col_idx, dtype=np.int64)
        row_ptr.flags.writeable = False
        col_idx.flags.writeable = False
        object.__setattr__(self, "row_ptr", row_ptr)
        object.__setattr__(self, "col_idx", col_idx)
        if len(row_ptr) != self.n + 1 or row_ptr[0] != 0 or row_ptr[-1] != len(col_idx):
            raise InputError("row_ptr inconsistent with n / col_idx")

    @property
    def m(self) -> int:
        return int(self.row_ptr[-1]) // 2

    def degrees(self) -> np.ndarray:
        return np.diff(self.row_ptr)

    def neighbors(self, u: int) -> np.ndarray:
        return self.col_idx[self.row_ptr[u]:self.row_ptr[u + 1]]

    def edges(self) -> np.ndarray:
        """Undirected edges as an ``(m, 2)`` array with ``u < v``, row-major order."""
        rows = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees())
        mask = rows < self.col_idx
        return np.column_stack([rows[mask], self.col_idx[mask]])

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        data = np.ones(len(self.col_idx), dtype=np.float64)
        return sp.csr_matrix((data, self.col_idx, self.row_ptr), shape=(self.n, self.n))

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        rows = np.repeat(np.arange(self.n), self.degrees())
        a[rows, self.col_idx] = 1.0
        return a

    def check(self) -> None:
        """Raise ``InputError`` if any structural invariant is violated."""
        deg = self.degrees()
        if np.any(deg < 0):
            raise InputError("row_ptr not monotone")
        if len(self.col_idx) and (self.col_idx.min() < 0 or self.col_idx.max() >= self.n):
            raise InputError("column index out of range")
        rows = np.repeat(np.arange(self.n, dtype=np.int64), deg)
        if np.any(rows == self.col_idx):
            raise InputError("self-loop present")
        same_row = rows[1:] == rows[:-1]
        if np.any(self.col_idx[1:][same_row] <= self.col_idx[:-1][same_row]):
            raise InputError("neighbor lists not strictly increasing")
        fwd = rows * self.n + self.col_idx
        rev = np.sort(self.col_idx * self.n + rows)
        if not np.array_equal(fwd, rev):
            raise InputError("adjacency not symmetric")

    def __eq__(self, other):
        if not isinstance(other, SparseGraph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.row_ptr, other.row_ptr)
            and np.array_equal(self.col_idx, other.col_idx)
        )

    def __hash__(self):
        return hash((self.n, self.row_ptr.tobytes(), self.col_idx.tobytes()))

    def __repr__(self):
        return f"SparseGraph(n={self.n}, m={self.m})"


def _from_directed_pairs(n: int, rows: np.ndarray, cols: np.ndarray) -> SparseGraph:
    # rows/cols must already hold both directions, no duplicates, no loops
    order = np.lexsort((cols, rows))
    rows = rows[order]
    cols = cols[order]
    row_ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=row_ptr[1:])
    return SparseGraph(n, row_ptr, cols)


def from_undirected_pairs(n: int, lo: np.ndarray, hi: np.ndarray) -> SparseGraph:
    """CSR graph from distinct loop-free undirected pairs."""
    lo = np.asarray(lo, dtype=np.int64)
    hi = np.asarray(hi, dtype=np.int64)
    return _from_directed_pairs(n, np.concatenate([lo, hi]), np.concatenate([hi, lo]))


def build(edges: WeightedEdgeList, threshold: float = 0.0) -> SparseGraph:
    """Threshold and binarize a weighted edge list.

    Weights of ``(u, v)`` and ``(v, u)`` entries are summed; the edge is kept
    iff the sum is strictly greater than ``threshold``. Self-loops are dropped.
    """
    n = int(edges.n)
    if n < 0:
        raise InputError("vertex count must be non-negative")
    if threshold < 0 or not np.isfinite(threshold):
        raise InputError(f"threshold must be a finite non-negative number, got {threshold}")
    src, dst, w = edges.src, edges.dst, edges.weight
    if len(src):
        bad = (src < 0) | (src >= n) | (dst < 0) | (dst >= n)
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            raise InputError(f"vertex id out of range [0, {n}): ({src[i]}, {dst[i]})")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            i = int(np.flatnonzero(~(w >= 0) | ~np.isfinite(w))[0])
            raise InputError(f"weight must be finite and non-negative: {w[i]}")

    keep = src != dst
    lo = np.minimum(src, dst)[keep]
    hi = np.maximum(src, dst)[keep]
    w = w[keep]
    keys, inverse = np.unique(lo * n + hi, return_inverse=True)
    total = np.bincount(inverse.ravel(), weights=w, minlength=len(keys))
    keys = keys[total > threshold]
    return from_undirected_pairs(n, keys // n if n else keys, keys % n if n else keys)


def graph_from_edges(n: int, pairs: Iterable[Sequence[int]]) -> SparseGraph:
    """Convenience: unweighted pairs straight to a graph (threshold 0)."""
    return build(WeightedEdgeList.from_tuples(n, ((u, v, 1.0) for u, v in pairs)), 0.0)


def matvec(g: SparseGraph, x) -> np.ndarray:
    """``A @ x``: ``result[u]`` is the sum of ``x`` over the neighbors of ``u``."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] != g.n:
        raise InputError(f"vector length {x.shape[0]} does not match n={g.n}")
    return g.adjacency @ x


def _check_bijection(pi: np.ndarray, n: int) -> None:
    if pi.shape != (n,) or not np.array_equal(np.sort(pi), np.arange(n)):
        raise InputError("pi is not a bijection on [0, n)")


def permute(g: SparseGraph, pi) -> SparseGraph:
    """Relabel vertex ``u`` as ``pi[u]``."""
    pi = np.asarray(pi, dtype=np.int64)
    _check_bijection(pi, g.n)
    rows = np.repeat(np.arange(g.n, dtype=np.int64), g.degrees())
    return _from_directed_pairs(g.n, pi[rows], pi[g.col_idx])


def inverse_permutation(pi) -> np.ndarray:
    pi = np.asarray(pi, dtype=np.int64)
    inv = np.empty_like(pi)
    inv[pi] = np.arange(len(pi))
    return inv


def induced_subgraph(g: SparseGraph, keep) -> tuple[SparseGraph, np.ndarray]:
    """Subgraph on ``keep`` (sorted, distinct), relabeled in order.

    Returns the subgraph and ``vertex_map`` with ``vertex_map[new] = old``.
    """
    keep = np.asarray(keep, dtype=np.int64).ravel()
    if len(keep):
        if keep[0] < 0 or keep[-1] >= g.n or np.any(keep < 0) or np.any(keep >= g.n):
            raise InputError("vertex id out of range in keep set")
        if np.any(np.diff(keep) <= 0):
            raise InputError("keep set must be sorted and free of duplicates")
    new_id = np.full(g.n, -1, dtype=np.int64)
    new_id[keep] = np.arange(len(keep))
    rows = np.repeat(np.arange(g.n, dtype=np.int64), g.degrees())
    r = new_id[rows]
    c = new_id[g.col_idx]
    mask = (r >= 0) & (c >= 0)
    # relabeling is monotone, so CSR order survives the filter
    r, c = r[mask], c[mask]
    row_ptr = np.zeros(len(keep) + 1, dtype=np.int64)
    np.cumsum(np.bincount(r, minlength=len(keep)), out=row_ptr[1:])
    return SparseGraph(len(keep), row_ptr, c), keep.copy()
