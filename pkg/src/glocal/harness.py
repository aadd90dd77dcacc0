"""Chained-vs-independent benchmark and oracle verification reports."""

from __future__ import annotations

import numpy as np

from . import oracle
from .eigen import top_eigenpairs
from .errors import GlocalError
from .graph_core import SparseGraph
from .invariants import (
    ComputeConfig,
    InvariantBundle,
    compute_all,
    local_triangles_approx,
    local_triangles_exact,
    scan_statistic_1,
)


class ModeMismatch(GlocalError):
    """Chained and independent runs disagreed."""


def _max_dev(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    return float(np.max(np.abs(a - b), initial=0.0))


def compare_bundles(chained: InvariantBundle, independent: InvariantBundle) -> dict:
    """Per-invariant max deviation; raises ``ModeMismatch`` past the allowed slack.

    deg and ss1 must agree bit for bit; spectral outputs within 1e-12.
    """
    devs = {}
    for key, vec in chained.vectors.items():
        other = independent.vectors[key].values
        devs[key] = _max_dev(vec.values, other)
        exact = key in ("deg", "ss1")
        if (exact and not np.array_equal(vec.values, other)) or devs[key] > 1e-12:
            raise ModeMismatch(f"{key} differs between modes (max deviation {devs[key]:.3g})")
    if chained.lp is not None:
        devs["lp"] = _max_dev(chained.lp.rows, independent.lp.rows)
        if devs["lp"] > 1e-12:
            raise ModeMismatch(f"lp differs between modes (max deviation {devs['lp']:.3g})")
    return devs


def bench(g: SparseGraph, config: ComputeConfig) -> dict:
    """Run every requested invariant independently, then chained, and compare."""
    independent = compute_all(g, config, mode="independent")
    chained = compute_all(g, config, mode="chained")
    devs = compare_bundles(chained, independent)
    ind_total = independent.timings["total"]
    ch_total = chained.timings["total"]
    return {
        "n": g.n,
        "m": g.m,
        "K": chained.K,
        "invariants": list(config.which),
        "independent": {k: v for k, v in independent.timings.items() if k != "total"},
        "chained": {k: v for k, v in chained.timings.items() if k != "total"},
        "independent_total": ind_total,
        "chained_total": ch_total,
        "ratio": ch_total / ind_total if ind_total > 0 else float("nan"),
        "eigensolver_calls": {
            "independent": independent.eigensolver_calls,
            "chained": chained.eigensolver_calls,
        },
        "max_deviation": devs,
    }


def format_bench(report: dict) -> str:
    lines = [f"graph: n={report['n']} m={report['m']} K={report['K']}"]
    lines.append(f"{'stage':<10} {'independent [s]':>16} {'chained [s]':>12}")
    stages = list(report["independent"]) + [
        s for s in report["chained"] if s not in report["independent"]
    ]
    for s in stages:
        ind = report["independent"].get(s)
        ch = report["chained"].get(s)
        ind_s = f"{ind:16.4f}" if ind is not None else f"{'-':>16}"
        ch_s = f"{ch:12.4f}" if ch is not None else f"{'-':>12}"
        lines.append(f"{s:<10} {ind_s} {ch_s}")
    lines.append(f"{'total':<10} {report['independent_total']:16.4f} {report['chained_total']:12.4f}")
    calls = report["eigensolver_calls"]
    lines.append(
        f"eigendecompositions: independent={calls['independent']} chained={calls['chained']}"
    )
    lines.append(f"chained/independent ratio: {report['ratio']:.4f}")
    lines.append("outputs identical between modes: yes")
    return "\n".join(lines)


def verify(g: SparseGraph, tol: float = 1e-8) -> dict:
    """Production-vs-oracle deviations on a small graph.

    ``ok`` is False when an exact invariant deviates at all or the
    full-spectrum triangle approximation misses by more than 1e-6.
    """
    report = {"n": g.n, "m": g.m}
    exact = local_triangles_exact(g)
    report["ss1"] = _max_dev(scan_statistic_1(g).values, oracle.brute_scan_statistic(g).values)
    report["nl3_exact"] = _max_dev(exact.values, oracle.brute_triangles(g).values)
    if g.n:
        eigs = top_eigenpairs(g, g.n, tol=tol)
        report["nl3_approx_full"] = _max_dev(local_triangles_approx(eigs).values, exact.values)
        if g.n <= oracle.DENSE_MAX_N:
            dense = oracle.dense_spectrum(g)
            report["eigenvalues"] = _max_dev(np.sort(eigs.values), np.sort(dense.values))
    else:
        report["nl3_approx_full"] = 0.0
    report["ok"] = (
        report["ss1"] == 0.0
        and report["nl3_exact"] == 0.0
        and report["nl3_approx_full"] < 1e-6
        and report.get("eigenvalues", 0.0) < 1e-6
    )
    return report


def format_verify(report: dict) -> str:
    lines = [f"graph: n={report['n']} m={report['m']}"]
    for key in ("ss1", "nl3_exact", "nl3_approx_full", "eigenvalues"):
        if key in report:
            lines.append(f"{key:<16} max |production - oracle| = {report[key]:.3e}")
    lines.append("PASS" if report["ok"] else "FAIL")
    return "\n".join(lines)
