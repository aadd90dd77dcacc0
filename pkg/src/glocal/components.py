"""Connected-component labeling and largest-component extraction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .graph_core import SparseGraph, induced_subgraph


@dataclass(frozen=True, eq=False)
class ComponentLabeling:
    labels: np.ndarray
    sizes: np.ndarray

    @property
    def count(self) -> int:
        return len(self.sizes)


def _gather_neighbors(g: SparseGraph, frontier: np.ndarray) -> np.ndarray:
    starts = g.row_ptr[frontier]
    lengths = g.row_ptr[frontier + 1] - starts
    total = int(lengths.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    # positions start_i, start_i+1, ... for every frontier vertex, flattened
    offsets = np.repeat(starts - np.cumsum(lengths) + lengths, lengths)
    return g.col_idx[offsets + np.arange(total)]


def connected_components(g: SparseGraph) -> ComponentLabeling:
    """Label components by iterative frontier expansion.

    Labels are assigned in increasing order of each component's smallest
    vertex id, so the component of vertex 0 is always label 0.
    """
    labels = np.full(g.n, -1, dtype=np.int64)
    sizes = []
    deg = g.degrees()
    label = 0
    for seed in range(g.n):
        if labels[seed] >= 0:
            continue
        labels[seed] = label
        size = 1
        if deg[seed]:
            frontier = np.array([seed], dtype=np.int64)
            while len(frontier):
                nbrs = _gather_neighbors(g, frontier)
                nbrs = np.unique(nbrs[labels[nbrs] < 0])
                labels[nbrs] = label
                size += len(nbrs)
                frontier = nbrs
        sizes.append(size)
        label += 1
    return ComponentLabeling(labels, np.asarray(sizes, dtype=np.int64))


def largest_connected_component(g: SparseGraph) -> tuple[SparseGraph, np.ndarray]:
    """Induced subgraph on the largest component plus its ``vertex_map``.

    Size ties go to the component holding the smallest vertex id, which is
    the lowest label.
    """
    if g.n == 0:
        raise InputError("largest connected component of an empty graph is undefined")
    cc = connected_components(g)
    # argmax returns the first maximum, i.e. the lowest label
    best = int(np.argmax(cc.sizes))
    keep = np.flatnonzero(cc.labels == best)
    return induced_subgraph(g, keep)
