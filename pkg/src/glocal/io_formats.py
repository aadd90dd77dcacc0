"""Graph readers/writers and invariant serialization.

Graph inputs: whitespace edge lists (0-based) and Matrix Market coordinate
files (1-based). Outputs: CSV with 17-significant-digit reals, and GLCV, a
little-endian binary vector container::

    offset  size  field
    0       4     magic b"GLCV"
    4       1     version (1)
    5       1     dtype (0 = float64, 1 = uint64)
    6       6     reserved, zero
    12      8     element count (u64)
    20      8*N   payload
"""

from __future__ import annotations

import io
import os
import struct
from typing import BinaryIO

import numpy as np

from .errors import InputError
from .graph_core import SparseGraph, WeightedEdgeList

GLCV_MAGIC = b"GLCV"
GLCV_VERSION = 1
GLCV_HEADER = struct.Struct("<4sBB6sQ")
GLCV_DTYPES = {0: np.dtype("<f8"), 1: np.dtype("<u8")}

CSV_COLUMNS = (("deg", "degree"), ("ss1", "ss1"), ("nl3", "nl3"), ("cc", "cc"))
FILE_STEMS = dict(CSV_COLUMNS)

GRAPH_FORMATS = ("edgelist", "matrixmarket")
VECTOR_FORMATS = ("csv", "glcv")


def _read_bytes(source) -> bytes:
    if isinstance(source, (bytes, bytearray, memoryview)):
        return bytes(source)
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            return fh.read()
    return source.read()


def _read_text(source) -> str:
    try:
        return _read_bytes(source).decode("utf-8")
    except UnicodeDecodeError as exc:
        raise InputError(f"input is not valid UTF-8: {exc}") from None


def _parse_id(token: str, lineno: int) -> int:
    try:
        value = int(token)
    except ValueError:
        raise InputError(f"malformed vertex id {token!r}", line=lineno) from None
    if value < 0:
        raise InputError(f"negative vertex id {value}", line=lineno)
    return value


def _parse_weight(token: str, lineno: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise InputError(f"malformed weight {token!r}", line=lineno) from None
    if not np.isfinite(value) or value < 0:
        raise InputError(f"weight must be finite and non-negative, got {token}", line=lineno)
    return value


def read_edge_list(source) -> WeightedEdgeList:
    """Parse ``u v [w]`` lines; ``#`` starts a comment, ``%n N`` fixes the vertex count."""
    src, dst, weight = [], [], []
    declared_n = None
    for lineno, raw in enumerate(_read_text(source).splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if tokens[0] == "%n":
            if len(tokens) != 2:
                raise InputError("header must be '%n <count>'", line=lineno)
            declared_n = _parse_id(tokens[1], lineno)
            continue
        if len(tokens) not in (2, 3):
            raise InputError(f"expected 'u v' or 'u v w', got {len(tokens)} fields", line=lineno)
        src.append(_parse_id(tokens[0], lineno))
        dst.append(_parse_id(tokens[1], lineno))
        weight.append(_parse_weight(tokens[2], lineno) if len(tokens) == 3 else 1.0)
    max_id = max(max(src, default=-1), max(dst, default=-1))
    if declared_n is None:
        n = max_id + 1
    else:
        n = declared_n
        if max_id >= n:
            raise InputError(f"vertex id {max_id} exceeds declared count {n}")
    return WeightedEdgeList(n, src, dst, weight)


def read_matrix_market(source) -> WeightedEdgeList:
    """Parse a square coordinate Matrix Market file into 0-based weighted edges.

    ``symmetric`` files list each undirected edge once; ``general`` files
    may list both directions, in which case the two weights are summed when
    the graph is built.
    """
    lines = _read_text(source).splitlines()
    if not lines:
        raise InputError("empty Matrix Market input", line=1)
    banner = lines[0].strip().split()
    if len(banner) != 5 or banner[0].lower() != "%%matrixmarket" or banner[1].lower() != "matrix":
        raise InputError("missing '%%MatrixMarket matrix ...' banner", line=1)
    layout, field, symmetry = (b.lower() for b in banner[2:])
    if layout != "coordinate":
        raise InputError(f"unsupported layout {layout!r}; only coordinate is supported", line=1)
    if field not in ("real", "integer", "pattern"):
        raise InputError(f"unsupported field {field!r}", line=1)
    if symmetry not in ("general", "symmetric"):
        raise InputError(f"unsupported symmetry {symmetry!r}", line=1)

    src, dst, weight = [], [], []
    size = None
    expected_fields = 2 if field == "pattern" else 3
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        tokens = line.split()
        if size is None:
            if len(tokens) != 3:
                raise InputError("size line must be 'rows cols entries'", line=lineno)
            rows, cols, nnz = (_parse_id(t, lineno) for t in tokens)
            if rows != cols:
                raise InputError(f"adjacency must be square, got {rows}x{cols}", line=lineno)
            size = (rows, nnz)
            continue
        if len(tokens) != expected_fields:
            raise InputError(f"expected {expected_fields} fields for {field} entries", line=lineno)
        i = _parse_id(tokens[0], lineno)
        j = _parse_id(tokens[1], lineno)
        if not (1 <= i <= size[0] and 1 <= j <= size[0]):
            raise InputError(f"index ({i}, {j}) outside declared bounds {size[0]}", line=lineno)
        src.append(i - 1)
        dst.append(j - 1)
        weight.append(_parse_weight(tokens[2], lineno) if field != "pattern" else 1.0)
    if size is None:
        raise InputError("missing size line")
    if len(src) != size[1]:
        raise InputError(f"declared {size[1]} entries, found {len(src)}")
    return WeightedEdgeList(size[0], src, dst, weight)


def read_graph(source, fmt: str) -> WeightedEdgeList:
    if fmt == "edgelist":
        return read_edge_list(source)
    if fmt == "matrixmarket":
        return read_matrix_market(source)
    raise InputError(f"unknown graph format {fmt!r}")


def guess_graph_format(path) -> str:
    return "matrixmarket" if str(path).lower().endswith((".mtx", ".mm")) else "edgelist"


def format_real(x: float) -> str:
    return format(float(x), ".17g")


def aggregate(edges: WeightedEdgeList) -> WeightedEdgeList:
    """Sum weights per unordered pair (loops kept) in canonical ``(lo, hi)`` order."""
    lo = np.minimum(edges.src, edges.dst)
    hi = np.maximum(edges.src, edges.dst)
    n = max(edges.n, 1)
    keys, inverse = np.unique(lo * n + hi, return_inverse=True)
    total = np.bincount(inverse.ravel(), weights=edges.weight, minlength=len(keys))
    return WeightedEdgeList(edges.n, keys // n, keys % n, total)


def write_edge_list(graph, sink: BinaryIO) -> None:
    """Write a ``SparseGraph`` as ``u v`` lines, or a weighted list as ``u v w``."""
    out = io.StringIO()
    if isinstance(graph, SparseGraph):
        out.write(f"%n {graph.n}\n")
        for u, v in graph.edges():
            out.write(f"{u} {v}\n")
    else:
        agg = aggregate(graph)
        out.write(f"%n {agg.n}\n")
        for u, v, w in zip(agg.src, agg.dst, agg.weight):
            out.write(f"{u} {v} {format_real(w)}\n")
    sink.write(out.getvalue().encode("utf-8"))


def write_matrix_market(graph, sink: BinaryIO) -> None:
    """Write a symmetric coordinate file (lower triangle, 1-based)."""
    out = io.StringIO()
    if isinstance(graph, SparseGraph):
        e = graph.edges()
        out.write("%%MatrixMarket matrix coordinate pattern symmetric\n")
        out.write(f"{graph.n} {graph.n} {len(e)}\n")
        for u, v in e:
            out.write(f"{v + 1} {u + 1}\n")
    else:
        agg = aggregate(graph)
        out.write("%%MatrixMarket matrix coordinate real symmetric\n")
        out.write(f"{agg.n} {agg.n} {len(agg)}\n")
        for u, v, w in zip(agg.src, agg.dst, agg.weight):
            out.write(f"{v + 1} {u + 1} {format_real(w)}\n")
    sink.write(out.getvalue().encode("utf-8"))


def write_vector_csv(name: str, values, sink: BinaryIO) -> None:
    out = io.StringIO()
    out.write(f"vertex,{name}\n")
    for v, x in enumerate(np.asarray(values)):
        out.write(f"{v},{_render(x)}\n")
    sink.write(out.getvalue().encode("utf-8"))


def _render(x) -> str:
    if isinstance(x, (np.unsignedinteger, np.signedinteger, int)):
        return str(int(x))
    return format_real(x)


def read_vector_csv(source) -> tuple[str, np.ndarray]:
    """Parse a two-column ``vertex,<name>`` CSV; returns ``(name, float64 values)``."""
    lines = _read_text(source).splitlines()
    if not lines:
        raise InputError("empty CSV input", line=1)
    header = lines[0].strip().split(",")
    if len(header) != 2 or header[0] != "vertex":
        raise InputError("vector CSV header must be 'vertex,<name>'", line=1)
    values = []
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        parts = raw.strip().split(",")
        if len(parts) != 2:
            raise InputError("expected 2 fields", line=lineno)
        if parts[0] != str(len(values)):
            raise InputError(f"vertex column out of sequence: {parts[0]!r}", line=lineno)
        try:
            values.append(float(parts[1]))
        except ValueError:
            raise InputError(f"malformed value {parts[1]!r}", line=lineno) from None
    return header[1], np.asarray(values, dtype=np.float64)


def write_invariants_csv(bundle, sink: BinaryIO, lp_sink: BinaryIO | None = None) -> None:
    """One row per vertex: ``vertex,degree,ss1,nl3,cc``; absent invariants are empty cells."""
    cols = [bundle.vectors.get(key) for key, _ in CSV_COLUMNS]
    out = io.StringIO()
    out.write("vertex," + ",".join(name for _, name in CSV_COLUMNS) + "\n")
    for v in range(bundle.n):
        cells = ["" if c is None else format_real(c.values[v]) for c in cols]
        out.write(f"{v}," + ",".join(cells) + "\n")
    sink.write(out.getvalue().encode("utf-8"))
    if lp_sink is not None and bundle.lp is not None:
        write_lp_csv(bundle.lp, lp_sink)


def write_lp_csv(lp, sink: BinaryIO) -> None:
    out = io.StringIO()
    out.write("vertex," + ",".join(f"lp_{j}" for j in range(lp.k)) + "\n")
    for v, row in enumerate(lp.rows):
        out.write(f"{v}," + ",".join(format_real(x) for x in row) + "\n")
    sink.write(out.getvalue().encode("utf-8"))


def write_eigenvalues_csv(values, sink: BinaryIO) -> None:
    out = io.StringIO()
    out.write("k,eigenvalue\n")
    for k, x in enumerate(values):
        out.write(f"{k},{format_real(x)}\n")
    sink.write(out.getvalue().encode("utf-8"))


def write_vector_binary(values, sink: BinaryIO, dtype: str | None = None) -> None:
    """Write a GLCV file; integer arrays default to uint64, everything else to float64."""
    values = np.asarray(values)
    if dtype is None:
        dtype = "uint64" if values.dtype.kind in "ui" else "float64"
    if dtype == "float64":
        code, payload = 0, values.astype("<f8")
    elif dtype == "uint64":
        if values.size and (np.any(values < 0) or np.any(values != np.floor(values))):
            raise InputError("uint64 GLCV payload requires non-negative integers")
        code, payload = 1, values.astype("<u8")
    else:
        raise InputError(f"unknown GLCV dtype {dtype!r}")
    sink.write(GLCV_HEADER.pack(GLCV_MAGIC, GLCV_VERSION, code, bytes(6), payload.size))
    sink.write(payload.tobytes())


def read_vector_binary(source) -> np.ndarray:
    data = _read_bytes(source)
    if len(data) < GLCV_HEADER.size:
        raise InputError(f"truncated GLCV header ({len(data)} bytes)")
    magic, version, code, _reserved, count = GLCV_HEADER.unpack_from(data)
    if magic != GLCV_MAGIC:
        raise InputError(f"bad GLCV magic {magic!r}")
    if version != GLCV_VERSION:
        raise InputError(f"unsupported GLCV version {version}")
    if code not in GLCV_DTYPES:
        raise InputError(f"unknown GLCV dtype code {code}")
    expected = GLCV_HEADER.size + 8 * count
    if len(data) != expected:
        raise InputError(f"GLCV payload length mismatch: expected {expected} bytes, got {len(data)}")
    return np.frombuffer(data, dtype=GLCV_DTYPES[code], count=count, offset=GLCV_HEADER.size).copy()


def glcv_bytes(values, dtype: str | None = None) -> bytes:
    buf = io.BytesIO()
    write_vector_binary(values, buf, dtype)
    return buf.getvalue()


def convert_bytes(payload: bytes, src_fmt: str, dst_fmt: str, name: str = "value",
                  dtype: str | None = None) -> bytes:
    """Convert between CSV and GLCV vectors, or between edge list and Matrix Market graphs."""
    buf = io.BytesIO()
    if src_fmt in VECTOR_FORMATS and dst_fmt in VECTOR_FORMATS:
        if src_fmt == "csv":
            _, values = read_vector_csv(payload)
        else:
            values = read_vector_binary(payload)
        if dst_fmt == "csv":
            write_vector_csv(name, values, buf)
        else:
            write_vector_binary(values, buf, dtype or "float64")
        return buf.getvalue()
    if src_fmt in GRAPH_FORMATS and dst_fmt in GRAPH_FORMATS:
        edges = read_graph(payload, src_fmt)
        if dst_fmt == "matrixmarket":
            write_matrix_market(edges, buf)
        else:
            write_edge_list(edges, buf)
        return buf.getvalue()
    raise InputError(f"unsupported conversion {src_fmt} -> {dst_fmt}")
