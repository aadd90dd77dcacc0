import io
import struct

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from glocal import io_formats as iof
from glocal.errors import InputError
from glocal.graph_core import build
from glocal.invariants import ComputeConfig, compute_all

from .conftest import graphs, k


class TestEdgeList:
    def test_plain(self):
        e = iof.read_edge_list(b"0 1\n1 2\n")
        assert e.n == 3
        assert e.tuples() == [(0, 1, 1.0), (1, 2, 1.0)]

    def test_header_and_weight(self):
        e = iof.read_edge_list(b"%n 5\n0 1 2.5\n")
        assert e.n == 5
        assert e.tuples() == [(0, 1, 2.5)]
        assert build(e).n == 5

    def test_comments_and_blank_lines(self):
        e = iof.read_edge_list(b"# header\n\n0 1\n  # indented\n")
        assert e.tuples() == [(0, 1, 1.0)]

    def test_empty(self):
        assert iof.read_edge_list(b"").n == 0

    @pytest.mark.parametrize("text,line", [
        (b"0 x\n", 1),
        (b"0 1\n-1 2\n", 2),
        (b"0 1 -3\n", 1),
        (b"0 1 2 3\n", 1),
        (b"0\n", 1),
        (b"0 1\n1 2.5\n", 2),
        (b"0 1 nan\n", 1),
    ])
    def test_errors_report_line(self, text, line):
        with pytest.raises(InputError) as info:
            iof.read_edge_list(text)
        assert info.value.line == line
        assert f"line {line}" in str(info.value)

    def test_id_beyond_header(self):
        with pytest.raises(InputError):
            iof.read_edge_list(b"%n 2\n0 2\n")


class TestMatrixMarket:
    def test_symmetric_real(self):
        e = iof.read_matrix_market(
            b"%%MatrixMarket matrix coordinate real symmetric\n3 3 1\n1 2 5.0\n")
        assert e.n == 3 and e.tuples() == [(0, 1, 5.0)]

    def test_pattern(self):
        e = iof.read_matrix_market(
            b"%%MatrixMarket matrix coordinate pattern symmetric\n% comment\n2 2 1\n1 2\n")
        assert e.n == 2 and e.tuples() == [(0, 1, 1.0)]

    def test_general_reciprocal_entries_summed(self):
        e = iof.read_matrix_market(
            b"%%MatrixMarket matrix coordinate real general\n2 2 2\n1 2 2\n2 1 2\n")
        assert build(e, 3.0).m == 1
        assert build(e, 4.0).m == 0

    @pytest.mark.parametrize("text", [
        b"%%MatrixMarket matrix coordinate real general\n3 4 1\n1 2 1\n",
        b"%%MatrixMarket matrix array real general\n2 2\n1\n0\n0\n1\n",
        b"%%MatrixMarket matrix coordinate complex general\n2 2 1\n1 2 1 0\n",
        b"%%MatrixMarket matrix coordinate real general\n2 2 1\n1 3 1\n",
        b"%%MatrixMarket matrix coordinate real general\n2 2 2\n1 2 1\n",
        b"0 1\n",
    ])
    def test_errors(self, text):
        with pytest.raises(InputError):
            iof.read_matrix_market(text)


class TestGlcv:
    def test_float_layout(self):
        data = iof.glcv_bytes(np.array([1.0, 2.0]))
        assert len(data) == 36
        assert data[:4] == b"GLCV" and data[4] == 1 and data[5] == 0
        assert data[6:12] == bytes(6)
        assert struct.unpack_from("<Q", data, 12)[0] == 2
        out = iof.read_vector_binary(data)
        assert out.dtype == np.float64 and list(out) == [1.0, 2.0]

    def test_empty(self):
        data = iof.glcv_bytes(np.array([], dtype=np.float64))
        assert len(data) == 20
        assert len(iof.read_vector_binary(data)) == 0

    def test_uint64(self):
        data = iof.glcv_bytes(np.array([3, 1, 4], dtype=np.int64))
        assert data[5] == 1
        out = iof.read_vector_binary(data)
        assert out.dtype == np.uint64 and list(out) == [3, 1, 4]

    @pytest.mark.parametrize("mutate", [
        lambda d: b"XXXX" + d[4:],
        lambda d: d[:4] + b"\x02" + d[5:],
        lambda d: d[:5] + b"\x07" + d[6:],
        lambda d: d[:-1],
        lambda d: d + b"\x00",
        lambda d: d[:10],
    ])
    def test_rejects_corruption(self, mutate):
        with pytest.raises(InputError):
            iof.read_vector_binary(mutate(iof.glcv_bytes(np.array([1.0, 2.0]))))

    def test_uint64_rejects_fractions(self):
        with pytest.raises(InputError):
            iof.glcv_bytes(np.array([1.5]), "uint64")

    @given(hnp.arrays(np.float64, st.integers(0, 50),
                      elements=st.floats(allow_nan=True, allow_infinity=True)))
    def test_float_round_trip_bit_exact(self, values):
        out = iof.read_vector_binary(iof.glcv_bytes(values, "float64"))
        assert out.tobytes() == values.astype("<f8").tobytes()

    @given(hnp.arrays(np.uint64, st.integers(0, 50)))
    def test_uint_round_trip(self, values):
        out = iof.read_vector_binary(iof.glcv_bytes(values, "uint64"))
        assert np.array_equal(out, values)


class TestCsv:
    @given(st.floats(allow_nan=False, allow_infinity=False))
    def test_real_rendering_round_trips(self, x):
        assert float(iof.format_real(x)) == x

    def test_integers_render_without_decimal(self):
        assert iof.format_real(2.0) == "2"

    def test_vector_round_trip(self):
        buf = io.BytesIO()
        iof.write_vector_csv("degree", np.array([2.0, 0.1, 3.0]), buf)
        assert buf.getvalue() == b"vertex,degree\n0,2\n1,0.10000000000000001\n2,3\n"
        name, values = iof.read_vector_csv(buf.getvalue())
        assert name == "degree" and list(values) == [2.0, 0.1, 3.0]

    def test_read_vector_csv_errors(self):
        with pytest.raises(InputError):
            iof.read_vector_csv(b"v,x\n0,1\n")
        with pytest.raises(InputError):
            iof.read_vector_csv(b"vertex,x\n1,1\n")
        with pytest.raises(InputError):
            iof.read_vector_csv(b"vertex,x\n0,abc\n")

    def test_invariants_csv_full_bundle(self):
        b = compute_all(k(3), ComputeConfig(which=("deg", "ss1", "nl3", "cc", "lp"), K=3, lp_dim=1))
        out, lp = io.BytesIO(), io.BytesIO()
        iof.write_invariants_csv(b, out, lp)
        lines = out.getvalue().decode().splitlines()
        assert lines[0] == "vertex,degree,ss1,nl3,cc"
        assert len(lines) == 4
        for v, line in enumerate(lines[1:]):
            cells = line.split(",")
            assert cells[:3] == [str(v), "2", "3"]
            assert float(cells[3]) == pytest.approx(1.0, abs=1e-9)
            assert float(cells[4]) == pytest.approx(1.0, abs=1e-9)
        lp_lines = lp.getvalue().decode().splitlines()
        assert lp_lines[0] == "vertex,lp_0"
        assert float(lp_lines[1].split(",")[1]) == pytest.approx(0.8165, abs=1e-4)

    def test_invariants_csv_degree_only(self):
        b = compute_all(k(3), ComputeConfig(which=("deg",)))
        out = io.BytesIO()
        iof.write_invariants_csv(b, out)
        assert out.getvalue().decode().splitlines()[1:] == ["0,2,,,", "1,2,,,", "2,2,,,"]


class TestConversion:
    def test_glcv_to_csv_and_back(self):
        values = np.array([2.0, 1.0, 0.30000000000000004])
        csv = iof.convert_bytes(iof.glcv_bytes(values), "glcv", "csv", name="degree")
        assert csv.decode().splitlines()[0] == "vertex,degree"
        glcv = iof.convert_bytes(csv, "csv", "glcv")
        assert iof.read_vector_binary(glcv).tobytes() == values.tobytes()
        assert iof.convert_bytes(glcv, "glcv", "csv", name="degree") == csv

    def test_edgelist_to_matrixmarket(self):
        mm = iof.convert_bytes(b"0 1\n1 2 2.5\n", "edgelist", "matrixmarket")
        assert mm.decode().splitlines()[0] == "%%MatrixMarket matrix coordinate real symmetric"
        back = iof.convert_bytes(mm, "matrixmarket", "edgelist")
        assert back.decode() == "%n 3\n0 1 1\n1 2 2.5\n"

    def test_unsupported_pair(self):
        with pytest.raises(InputError):
            iof.convert_bytes(b"0 1\n", "edgelist", "csv")

    @given(graphs(), st.randoms(use_true_random=False))
    def test_matrix_market_and_edge_list_build_identically(self, g, rnd):
        edges = [tuple(map(int, e)) for e in g.edges()]
        rnd.shuffle(edges)
        el = "".join(f"{u} {v}\n" for u, v in edges)
        el = f"%n {g.n}\n" + el
        rnd.shuffle(edges)
        mm = "%%MatrixMarket matrix coordinate pattern symmetric\n"
        mm += f"{g.n} {g.n} {len(edges)}\n" + "".join(f"{v + 1} {u + 1}\n" for u, v in edges)
        a = build(iof.read_edge_list(el.encode()))
        b = build(iof.read_matrix_market(mm.encode()))
        assert a == b == g

    @given(graphs())
    def test_writers_round_trip_graphs(self, g):
        buf = io.BytesIO()
        iof.write_edge_list(g, buf)
        assert build(iof.read_edge_list(buf.getvalue())) == g
        buf = io.BytesIO()
        iof.write_matrix_market(g, buf)
        assert build(iof.read_matrix_market(buf.getvalue())) == g
