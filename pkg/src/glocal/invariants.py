"""Per-vertex (glocal) invariants and the shared-computation driver.

The five invariants are degree, scan statistic-1, local triangle counts
(exact, or the eigen-approximation), clustering coefficient and latent
positions. ``compute_all`` runs each prerequisite once and reuses it;
its ``independent`` mode recomputes prerequisites per invariant and exists
for benchmarking.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .eigen import DEFAULT_TOL, EigenPairs, top_eigenpairs
from .errors import InputError
from .graph_core import SparseGraph, matvec

INVARIANT_NAMES = ("deg", "ss1", "nl3", "cc", "lp")
SCALE_MODES = ("scaled", "eigenvector")
DEFAULT_K = 100


@dataclass(frozen=True, eq=False)
class InvariantVector:
    kind: str
    values: np.ndarray

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True, eq=False)
class LatentPositionMatrix:
    """``rows[v]`` is the embedding of vertex ``v``."""

    rows: np.ndarray
    scale_mode: str

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def k(self) -> int:
        return self.rows.shape[1]


def degree(g: SparseGraph) -> InvariantVector:
    return InvariantVector("degree", matvec(g, np.ones(g.n)))


def _edges_among_neighbors(g: SparseGraph) -> np.ndarray:
    # every triangle at u is seen from both of its edges incident to u
    return _kernels.edge_support_sums(g.row_ptr, g.col_idx, g.n) // 2


def scan_statistic_1(g: SparseGraph) -> InvariantVector:
    """Edge count of the subgraph induced by each closed 1-hop neighborhood.

    That is ``deg(v)`` plus the number of edges among the neighbors of ``v``.
    """
    among = _edges_among_neighbors(g)
    return InvariantVector("ss1", (g.degrees() + among).astype(np.float64))


def local_triangles_exact(g: SparseGraph) -> InvariantVector:
    counts = _kernels.forward_triangles(g.row_ptr, g.col_idx, g.n)
    return InvariantVector("nl3_exact", counts.astype(np.float64))


def local_triangles_approx(eigs: EigenPairs) -> InvariantVector:
    """``0.5 * sum_k l_k**3 * x_vk**2`` over the supplied eigenpairs.

    Negative values are possible when few pairs are used and are kept.
    """
    if eigs.K == 0:
        raise InputError("at least one eigenpair is required")
    values = 0.5 * (eigs.vectors ** 2) @ (eigs.values ** 3)
    return InvariantVector("nl3_approx", values)


def clustering_coefficient(deg: InvariantVector, nl3: InvariantVector) -> InvariantVector:
    """``2 * nl3 / (d * (d - 1))``; zero where ``d <= 1``, negatives clamped to 0."""
    d = np.asarray(deg.values, dtype=np.float64)
    t = np.asarray(nl3.values, dtype=np.float64)
    if d.shape != t.shape:
        raise InputError(f"length mismatch: degree {d.shape[0]}, nl3 {t.shape[0]}")
    out = np.zeros_like(d)
    ok = d >= 2
    out[ok] = 2.0 * np.maximum(t[ok], 0.0) / (d[ok] * (d[ok] - 1.0))
    return InvariantVector("cc", out)


def latent_positions(eigs: EigenPairs, k: int, scale_mode: str = "scaled") -> LatentPositionMatrix:
    """Rows of the first ``k`` eigenvectors, optionally scaled by ``sqrt(|l|)``."""
    if scale_mode not in SCALE_MODES:
        raise InputError(f"unknown scale mode {scale_mode!r}")
    if k < 1 or k > eigs.K:
        raise InputError(f"embedding dimension {k} not in [1, {eigs.K}]")
    rows = eigs.vectors[:, :k].copy()
    if scale_mode == "scaled":
        rows *= np.sqrt(np.abs(eigs.values[:k]))
    return LatentPositionMatrix(rows, scale_mode)


@dataclass(frozen=True)
class ComputeConfig:
    which: tuple = INVARIANT_NAMES
    K: int = DEFAULT_K
    lp_dim: int | None = None
    scale_mode: str = "scaled"
    tol: float = DEFAULT_TOL
    max_iter: int | None = None

    def __post_init__(self):
        which = tuple(self.which)
        unknown = [w for w in which if w not in INVARIANT_NAMES]
        if unknown:
            raise InputError(f"unknown invariant(s): {', '.join(unknown)}")
        if not which:
            raise InputError("no invariants requested")
        # canonical order, no duplicates
        object.__setattr__(self, "which", tuple(w for w in INVARIANT_NAMES if w in which))
        if self.K < 1:
            raise InputError("K must be at least 1")
        if self.lp_dim is not None and not 1 <= self.lp_dim <= self.K:
            raise InputError(f"lp_dim must lie in [1, K={self.K}]")
        if self.scale_mode not in SCALE_MODES:
            raise InputError(f"unknown scale mode {self.scale_mode!r}")

    @property
    def needs_eigs(self) -> bool:
        return any(w in self.which for w in ("nl3", "cc", "lp"))

    @property
    def lp_dim_requested(self) -> int:
        return self.lp_dim if self.lp_dim is not None else min(self.K, 100)


@dataclass(eq=False)
class InvariantBundle:
    n: int
    m: int
    config: ComputeConfig
    vectors: dict = field(default_factory=dict)
    lp: LatentPositionMatrix | None = None
    eigenvalues: np.ndarray | None = None
    timings: dict = field(default_factory=dict)
    eigensolver_calls: int = 0
    degree_calls: int = 0
    threshold: float | None = None
    lcc: bool = False

    @property
    def K(self) -> int:
        return 0 if self.eigenvalues is None else len(self.eigenvalues)

    @property
    def lp_dim(self) -> int:
        return 0 if self.lp is None else self.lp.k


class _Runner:
    def __init__(self, g: SparseGraph, config: ComputeConfig, bundle: InvariantBundle):
        self.g = g
        self.config = config
        self.bundle = bundle

    def timed(self, stage, fn, *args):
        t0 = time.perf_counter()
        out = fn(*args)
        self.bundle.timings[stage] = self.bundle.timings.get(stage, 0.0) + time.perf_counter() - t0
        return out

    def degree(self, stage="deg"):
        self.bundle.degree_calls += 1
        return self.timed(stage, degree, self.g)

    def eigs(self, stage="eigen"):
        self.bundle.eigensolver_calls += 1
        c = self.config
        K = min(c.K, self.g.n)
        return self.timed(stage, top_eigenpairs, self.g, K, c.tol, c.max_iter)


def compute_all(
    g: SparseGraph,
    config: ComputeConfig | None = None,
    mode: str = "chained",
    threshold: float | None = None,
    lcc: bool = False,
) -> InvariantBundle:
    """Compute the requested invariants of ``g``.

    In ``chained`` mode the degree vector and the eigendecomposition are
    computed at most once and shared (CC reuses degree and NL-3, LP reuses
    the eigenpairs). In ``independent`` mode every invariant recomputes its
    own prerequisites, each timed under the invariant's own name.
    """
    if config is None:
        config = ComputeConfig()
    if mode not in ("chained", "independent"):
        raise InputError(f"unknown mode {mode!r}")
    if g.n == 0:
        raise InputError("cannot compute invariants of an empty graph")
    bundle = InvariantBundle(g.n, g.m, config, threshold=threshold, lcc=lcc)
    run = _Runner(g, config, bundle)
    which = config.which
    lp_dim = None

    if mode == "chained":
        deg = run.degree() if ("deg" in which or "cc" in which) else None
        if "deg" in which:
            bundle.vectors["deg"] = deg
        if "ss1" in which:
            bundle.vectors["ss1"] = run.timed("ss1", scan_statistic_1, g)
        if config.needs_eigs:
            eigs = run.eigs()
            bundle.eigenvalues = eigs.values
            lp_dim = min(config.lp_dim_requested, eigs.K)
            nl3 = None
            if "nl3" in which or "cc" in which:
                nl3 = run.timed("nl3", local_triangles_approx, eigs)
            if "nl3" in which:
                bundle.vectors["nl3"] = nl3
            if "cc" in which:
                bundle.vectors["cc"] = run.timed("cc", clustering_coefficient, deg, nl3)
            if "lp" in which:
                bundle.lp = run.timed("lp", latent_positions, eigs, lp_dim, config.scale_mode)
    else:
        for name in which:
            t0 = time.perf_counter()
            if name == "deg":
                bundle.vectors["deg"] = run.degree("_deg")
            elif name == "ss1":
                bundle.vectors["ss1"] = scan_statistic_1(g)
            elif name == "nl3":
                eigs = run.eigs("_eigen")
                bundle.vectors["nl3"] = local_triangles_approx(eigs)
            elif name == "cc":
                deg = run.degree("_deg")
                eigs = run.eigs("_eigen")
                bundle.vectors["cc"] = clustering_coefficient(deg, local_triangles_approx(eigs))
            elif name == "lp":
                eigs = run.eigs("_eigen")
                lp_dim = min(config.lp_dim_requested, eigs.K)
                bundle.lp = latent_positions(eigs, lp_dim, config.scale_mode)
            if name in ("nl3", "cc", "lp"):
                bundle.eigenvalues = eigs.values
            bundle.timings[name] = time.perf_counter() - t0
        # prerequisite sub-timings are already folded into each invariant
        for key in ("_deg", "_eigen"):
            bundle.timings.pop(key, None)
    bundle.timings["total"] = sum(v for k, v in bundle.timings.items())
    return bundle
