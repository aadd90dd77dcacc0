"""Top-K eigenpairs (by magnitude) of a symmetric adjacency matrix.

Lanczos with full (twice-applied Gram-Schmidt) reorthogonalization and thick
restarts: the basis never grows beyond ``m`` vectors, and on restart the
best ``k_keep`` Ritz vectors plus the residual direction seed the next
cycle. The projected matrix is kept explicitly, so after a restart it is
arrowhead-shaped rather than tridiagonal.
"""

from __future__ import annotations

import functools
import logging
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, InputError
from .graph_core import SparseGraph

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class EigenPairs:
    """Eigenvalues sorted by descending magnitude and unit eigenvectors (columns)."""

    values: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray
    matvecs: int = 0

    @property
    def K(self) -> int:
        return len(self.values)

    @property
    def n(self) -> int:
        return self.vectors.shape[0]


def default_max_iter(K: int) -> int:
    return 20 * K + 100


def magnitude_order(values, tie_tol=None) -> np.ndarray:
    """Indices sorting ``values`` by descending ``|value|``.

    Magnitudes within ``tie_tol`` count as equal and are ordered by
    descending algebraic value, so ``+l`` precedes ``-l``.
    """
    values = np.asarray(values, dtype=np.float64)
    if tie_tol is None:
        tie_tol = 1e-9 * max(1.0, float(np.abs(values).max(initial=0.0)))

    def cmp(i, j):
        a, b = values[i], values[j]
        if abs(abs(a) - abs(b)) > tie_tol:
            return -1 if abs(a) > abs(b) else 1
        if abs(a - b) > tie_tol:
            return -1 if a > b else 1
        return i - j

    return np.array(sorted(range(len(values)), key=functools.cmp_to_key(cmp)), dtype=np.int64)


def fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so the largest-magnitude entry is non-negative.

    Entries within 1e-9 of the column maximum are ties; the lowest index wins.
    """
    out = np.array(vectors, dtype=np.float64, copy=True)
    if out.size == 0:
        return out
    mags = np.abs(out)
    for k in range(out.shape[1]):
        col = mags[:, k]
        idx = int(np.flatnonzero(col >= col.max() - 1e-9)[0])
        if out[idx, k] < 0:
            out[:, k] = -out[:, k]
    return out


def _orthogonalize(w: np.ndarray, basis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    h = basis.T @ w
    w = w - basis @ h
    h2 = basis.T @ w
    w = w - basis @ h2
    return w, h + h2


def _fresh_direction(basis: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    n = basis.shape[0]
    for _ in range(10):
        w = rng.standard_normal(n)
        w, _ = _orthogonalize(w, basis)
        w, _ = _orthogonalize(w, basis)
        norm = np.linalg.norm(w)
        if norm > 1e-8:
            return w / norm
    raise ConvergenceError("could not extend Krylov basis after breakdown")


def top_eigenpairs(
    g: SparseGraph,
    K: int,
    tol: float = DEFAULT_TOL,
    max_iter: int | None = None,
) -> EigenPairs:
    """Compute the ``K`` eigenpairs of largest magnitude.

    Parameters
    ----------
    g : SparseGraph
        Graph whose adjacency matrix is decomposed.
    K : int
        Number of pairs; clamped to ``n`` with a warning.
    tol : float
        Every returned pair satisfies ``||A x - l x|| <= tol * max(1, |l_1|)``.
    max_iter : int, optional
        Budget of matrix-vector products, default ``20 K + 100``.

    Raises
    ------
    ConvergenceError
        If the budget runs out; ``.converged`` holds the number of wanted
        pairs that had met the tolerance.
    """
    n = g.n
    if K < 1:
        raise InputError("K must be at least 1")
    if not tol > 0:
        raise InputError("tol must be positive")
    if K > n:
        warnings.warn(f"K={K} exceeds n={n}; clamping to {n}", stacklevel=2)
        K = n
    if max_iter is None:
        max_iter = default_max_iter(K)
    if n == 0:
        empty = np.empty(0)
        return EigenPairs(empty, np.empty((0, 0)), empty)

    A = g.adjacency
    m = min(n, max(2 * K + 20, 40))
    k_keep_target = min(m - 1, K + (m - K) // 2)

    V = np.zeros((n, m + 1))
    T = np.zeros((m, m))
    rng = np.random.default_rng(n)
    v0 = rng.standard_normal(n)
    V[:, 0] = v0 / np.linalg.norm(v0)
    breakdowns = 0

    k = 0
    matvecs = 0
    beta = 0.0
    cycle = 0
    while True:
        for j in range(k, m):
            w = A @ V[:, j]
            matvecs += 1
            w, h = _orthogonalize(w, V[:, : j + 1])
            T[: j + 1, j] = h
            T[j, : j + 1] = h
            beta = float(np.linalg.norm(w))
            if j + 1 == n:
                # Krylov space is all of R^n; residual is rounding noise
                V[:, j + 1] = 0.0
                break
            scale = max(1.0, float(np.abs(T[: j + 1, : j + 1]).max()))
            if beta <= 1e-12 * scale:
                breakdowns += 1
                brng = np.random.default_rng((n, breakdowns))
                V[:, j + 1] = _fresh_direction(V[:, : j + 1], brng)
                beta = 0.0
            else:
                V[:, j + 1] = w / beta

        theta, S = np.linalg.eigh(T)
        order = magnitude_order(theta)
        want = order[:K]
        lam_scale = max(1.0, abs(theta[order[0]]))
        estimates = np.abs(beta * S[m - 1, want])
        n_conv = int(np.sum(estimates <= tol * lam_scale))
        cycle += 1
        logger.debug("cycle %d: %d/%d converged after %d matvecs", cycle, n_conv, K, matvecs)

        if n_conv == K or m == n:
            X = V[:, :m] @ S[:, want]
            X /= np.linalg.norm(X, axis=0)
            values = theta[want]
            X = fix_signs(X)
            R = A @ X - X * values
            residuals = np.linalg.norm(R, axis=0)
            if np.all(residuals <= tol * lam_scale) or m == n:
                return EigenPairs(values.copy(), X, residuals, matvecs)

        if matvecs >= max_iter:
            raise ConvergenceError(
                f"eigensolver did not converge in {matvecs} matrix-vector products "
                f"({n_conv} of {K} pairs converged)",
                converged=n_conv,
            )

        # thick restart: keep the best Ritz vectors, continue from the residual
        keep = order[:k_keep_target]
        k = len(keep)
        V[:, :k] = V[:, :m] @ S[:, keep]
        V[:, k] = V[:, m]
        V[:, k + 1:] = 0.0
        T[:] = 0.0
        T[np.arange(k), np.arange(k)] = theta[keep]
