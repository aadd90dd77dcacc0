"""Read -> threshold/binarize -> optional LCC -> invariants -> files.

Shared by the CLI ``compute`` command and the HTTP service so both produce
the same bytes for the same input and configuration.
"""

from __future__ import annotations

import io
import json
import os
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import io_formats
from .components import largest_connected_component
from .eigen import DEFAULT_TOL
from .errors import InputError
from .graph_core import SparseGraph, build
from .invariants import DEFAULT_K, INVARIANT_NAMES, SCALE_MODES, ComputeConfig, InvariantBundle, compute_all

PIPELINE_ORDER = ["threshold", "binarize", "lcc"]


@dataclass
class RunConfig:
    invariants: tuple = INVARIANT_NAMES
    input_format: str = "edgelist"
    threshold: float = 0.0
    lcc: bool = False
    K: int = DEFAULT_K
    lp_dim: int | None = None
    scale_mode: str = "scaled"
    tol: float = DEFAULT_TOL
    max_iter: int | None = None
    output_format: str = "csv"

    def __post_init__(self):
        if isinstance(self.invariants, str):
            self.invariants = tuple(s.strip() for s in self.invariants.split(",") if s.strip())
        self.invariants = tuple(self.invariants)
        if not self.invariants:
            raise InputError("invariant subset must be nonempty")
        if self.input_format not in io_formats.GRAPH_FORMATS:
            raise InputError(f"unknown input format {self.input_format!r}")
        if self.output_format not in io_formats.VECTOR_FORMATS:
            raise InputError(f"unknown output format {self.output_format!r}")
        if not (isinstance(self.threshold, (int, float)) and self.threshold >= 0):
            raise InputError("threshold must be a non-negative number")
        if self.scale_mode not in SCALE_MODES:
            raise InputError(f"scale_mode must be one of {SCALE_MODES}")
        if not self.tol > 0:
            raise InputError("tol must be positive")
        if self.max_iter is not None and self.max_iter < 1:
            raise InputError("max_iter must be positive")
        # validates names, K and lp_dim
        self.compute_config()

    def compute_config(self) -> ComputeConfig:
        return ComputeConfig(
            which=self.invariants,
            K=self.K,
            lp_dim=self.lp_dim,
            scale_mode=self.scale_mode,
            tol=self.tol,
            max_iter=self.max_iter,
        )

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        if not isinstance(doc, dict):
            raise InputError("config must be a JSON object")
        aliases = {"eigs": "K", "format": "input_format"}
        known = set(cls.__dataclass_fields__)
        kwargs = {}
        for key, value in doc.items():
            key = aliases.get(key, key)
            if key not in known:
                raise InputError(f"unknown config field {key!r}")
            kwargs[key] = value
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise InputError(str(exc)) from None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["invariants"] = list(self.invariants)
        return d


@dataclass
class RunResult:
    bundle: InvariantBundle
    graph: SparseGraph
    vertex_map: np.ndarray | None
    n_input: int
    m_input: int
    files: list = field(default_factory=list)


def prepare_graph(source, config: RunConfig):
    """Parse, threshold/binarize and optionally reduce to the LCC."""
    edges = io_formats.read_graph(source, config.input_format)
    g = build(edges, config.threshold)
    n_input, m_input = g.n, g.m
    vertex_map = None
    if config.lcc:
        g, vertex_map = largest_connected_component(g)
    return g, vertex_map, n_input, m_input


def run(source, config: RunConfig) -> RunResult:
    g, vertex_map, n_input, m_input = prepare_graph(source, config)
    bundle = compute_all(g, config.compute_config(), threshold=config.threshold, lcc=config.lcc)
    return RunResult(bundle, g, vertex_map, n_input, m_input)


def _metadata(result: RunResult, config: RunConfig, files: list) -> dict:
    b = result.bundle
    meta = {
        "n": b.n,
        "m": b.m,
        "n_input": result.n_input,
        "m_input": result.m_input,
        "threshold": config.threshold,
        "threshold_rule": "keep iff summed weight > threshold",
        "lcc": config.lcc,
        "pipeline_order": PIPELINE_ORDER if config.lcc else PIPELINE_ORDER[:2],
        "invariants": list(b.config.which),
        "K_requested": config.K,
        "K": b.K,
        "lp_dim": b.lp_dim,
        "scale_mode": config.scale_mode,
        "tol": config.tol,
        "max_iter": config.max_iter,
        "ss1_neighborhood": "closed",
        "nl3_method": "eigen_approx",
        "nl3_negative_values": "preserved",
        "cc_negative_nl3": "clamped_to_zero",
        "cc_degree_below_2": 0,
        "eigensolver_calls": b.eigensolver_calls,
        "output_format": config.output_format,
        "files": files,
    }
    if result.vertex_map is not None:
        meta["vertex_map"] = [int(v) for v in result.vertex_map]
    return meta


def _dump_json(doc: dict) -> bytes:
    return (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode("utf-8")


def render_files(result: RunResult, config: RunConfig) -> dict[str, bytes]:
    """All output files as ``{filename: bytes}``; ``timings.json`` is the only nondeterministic one."""
    b = result.bundle
    files: dict[str, bytes] = {}
    csv = config.output_format == "csv"
    for key, stem in io_formats.CSV_COLUMNS:
        vec = b.vectors.get(key)
        if vec is None:
            continue
        if csv:
            files[f"{stem}.csv"] = _to_bytes(io_formats.write_vector_csv, stem, vec.values)
        else:
            dtype = "uint64" if key in ("deg", "ss1") else "float64"
            files[f"{stem}.glcv"] = io_formats.glcv_bytes(vec.values, dtype)
    if b.lp is not None:
        if csv:
            files["lp.csv"] = _to_bytes(io_formats.write_lp_csv, b.lp)
        else:
            for j in range(b.lp.k):
                files[f"lp_{j}.glcv"] = io_formats.glcv_bytes(b.lp.rows[:, j], "float64")
    if b.eigenvalues is not None:
        if csv:
            files["eigenvalues.csv"] = _to_bytes(io_formats.write_eigenvalues_csv, b.eigenvalues)
        else:
            files["eigenvalues.glcv"] = io_formats.glcv_bytes(b.eigenvalues, "float64")
    names = sorted(files) + ["metadata.json", "timings.json"]
    files["metadata.json"] = _dump_json(_metadata(result, config, names))
    files["timings.json"] = _dump_json({
        "timings": b.timings,
        "eigensolver_calls": b.eigensolver_calls,
        "degree_calls": b.degree_calls,
    })
    return files


def _to_bytes(writer, *args) -> bytes:
    buf = io.BytesIO()
    writer(*args, buf)
    return buf.getvalue()


def write_files(files: dict[str, bytes], out_dir) -> None:
    """Write each file under a temp name in ``out_dir``, then rename it into place."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, data in files.items():
        fd, tmp = tempfile.mkstemp(dir=out_dir, prefix=f".{name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
            os.replace(tmp, out_dir / name)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


def compute_to_dir(source, config: RunConfig, out_dir) -> RunResult:
    result = run(source, config)
    files = render_files(result, config)
    write_files(files, out_dir)
    result.files = sorted(files)
    return result
