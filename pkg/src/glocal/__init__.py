"""Glocal (per-vertex, whole-graph) invariants of large sparse graphs."""

from .components import ComponentLabeling, connected_components, largest_connected_component
from .eigen import EigenPairs, top_eigenpairs
from .errors import ConvergenceError, GlocalError, InputError, SizeGuardError
from .graph_core import (
    SparseGraph,
    WeightedEdgeList,
    build,
    graph_from_edges,
    induced_subgraph,
    matvec,
    permute,
)
from .invariants import (
    ComputeConfig,
    InvariantBundle,
    InvariantVector,
    LatentPositionMatrix,
    clustering_coefficient,
    compute_all,
    degree,
    latent_positions,
    local_triangles_approx,
    local_triangles_exact,
    scan_statistic_1,
)

__version__ = "0.1.0"
