import itertools

import numpy as np
import pytest
from hypothesis import given, settings

from glocal.eigen import EigenPairs, top_eigenpairs
from glocal.errors import InputError
from glocal.graph_core import permute
from glocal.invariants import (
    ComputeConfig,
    InvariantVector,
    clustering_coefficient,
    compute_all,
    degree,
    latent_positions,
    local_triangles_approx,
    local_triangles_exact,
    scan_statistic_1,
)
from glocal.random_graphs import erdos_renyi

from .conftest import cycle, empty, graphs, graphs_with_permutation, k, path, star


def vals(v):
    return list(v.values)


class TestDegree:
    def test_examples(self):
        assert vals(degree(k(3))) == [2, 2, 2]
        assert vals(degree(star(3))) == [3, 1, 1, 1]
        assert vals(degree(path(3))) == [1, 2, 1]

    @given(graphs())
    def test_handshake(self, g):
        assert degree(g).values.sum() == 2 * g.m


class TestScanStatistic:
    def test_examples(self):
        assert vals(scan_statistic_1(k(3))) == [3, 3, 3]
        # path: leaf sees {0,1} -> 1 edge; centre sees the whole path -> 2 edges
        assert vals(scan_statistic_1(path(3))) == [1, 2, 1]
        # C4: each closed neighborhood is a 3-vertex path, no chords
        assert vals(scan_statistic_1(cycle(4))) == [2, 2, 2, 2]

    @given(graphs())
    def test_degree_plus_triangles(self, g):
        ss1 = scan_statistic_1(g).values
        assert np.array_equal(ss1, degree(g).values + local_triangles_exact(g).values)


class TestExactTriangles:
    def test_examples(self):
        assert vals(local_triangles_exact(k(3))) == [1, 1, 1]
        # K4: each vertex sits in C(3,2) = 3 triangles, 4 triangles in total
        t = local_triangles_exact(k(4)).values
        assert list(t) == [3, 3, 3, 3] and t.sum() == 12
        assert vals(local_triangles_exact(cycle(4))) == [0, 0, 0, 0]

    @given(graphs(max_n=15))
    def test_matches_neighbor_pair_enumeration(self, g):
        a = g.to_dense()
        expected = [
            sum(a[x, y] for x, y in itertools.combinations(np.flatnonzero(a[v]), 2))
            for v in range(g.n)
        ]
        assert vals(local_triangles_exact(g)) == expected


class TestApproxTriangles:
    def test_k3_full_spectrum(self):
        e = top_eigenpairs(k(3), 3)
        # 0.5 * (8/3 - 1/3 - 1/3) = 1
        assert np.allclose(local_triangles_approx(e).values, 1.0, atol=1e-9)

    def test_k3_one_pair(self):
        e = top_eigenpairs(k(3), 1)
        # 0.5 * 8 * (1/3) = 4/3
        assert np.allclose(local_triangles_approx(e).values, 4.0 / 3.0, atol=1e-12)

    def test_c4_two_pairs_cancel(self):
        vecs = np.column_stack([np.ones(4) / 2, np.array([1, -1, 1, -1]) / 2])
        e = EigenPairs(np.array([2.0, -2.0]), vecs, np.zeros(2))
        assert np.allclose(local_triangles_approx(e).values, 0.0, atol=1e-15)
        e2 = top_eigenpairs(cycle(4), 2)
        assert np.allclose(local_triangles_approx(e2).values, 0.0, atol=1e-12)

    def test_negative_values_preserved(self):
        e = EigenPairs(np.array([-2.0]), np.array([[1.0], [0.0]]), np.zeros(1))
        assert vals(local_triangles_approx(e)) == [-4.0, 0.0]

    def test_needs_pairs(self):
        with pytest.raises(InputError):
            local_triangles_approx(EigenPairs(np.empty(0), np.empty((3, 0)), np.empty(0)))

    @given(graphs(min_n=1, max_n=30))
    @settings(max_examples=50, deadline=None)
    def test_full_spectrum_is_exact(self, g):
        e = top_eigenpairs(g, g.n)
        approx = local_triangles_approx(e).values
        assert np.allclose(approx, local_triangles_exact(g).values, atol=1e-6)


class TestClusteringCoefficient:
    def test_complete_graphs(self):
        for n in (3, 4):
            g = k(n)
            cc = clustering_coefficient(degree(g), local_triangles_exact(g))
            assert np.allclose(cc.values, 1.0)

    def test_path_is_zero(self):
        g = path(3)
        assert vals(clustering_coefficient(degree(g), local_triangles_exact(g))) == [0, 0, 0]

    def test_low_degree_and_negative_inputs(self):
        deg = InvariantVector("degree", np.array([0.0, 1.0, 3.0, 3.0]))
        nl3 = InvariantVector("nl3_approx", np.array([0.5, 0.5, -1.0, 1.5]))
        assert vals(clustering_coefficient(deg, nl3)) == [0.0, 0.0, 0.0, 0.5]

    def test_length_mismatch(self):
        with pytest.raises(InputError):
            clustering_coefficient(degree(k(3)), degree(k(4)))

    @given(graphs())
    def test_exact_backed_in_unit_interval(self, g):
        cc = clustering_coefficient(degree(g), local_triangles_exact(g)).values
        assert np.all((cc >= 0) & (cc <= 1))


class TestLatentPositions:
    def test_k3_scaled(self):
        lp = latent_positions(top_eigenpairs(k(3), 1), 1)
        # sqrt(2) / sqrt(3)
        assert np.allclose(lp.rows[:, 0], np.sqrt(2.0 / 3.0), atol=1e-12)
        assert lp.rows[0, 0] == pytest.approx(0.8165, abs=1e-4)

    def test_eigenvector_mode(self):
        g = erdos_renyi(50, 0.2, seed=2)
        e = top_eigenpairs(g, 3)
        lp = latent_positions(e, 1, "eigenvector")
        assert np.array_equal(lp.rows[:, 0], e.vectors[:, 0])
        lp3 = latent_positions(e, 3, "eigenvector")
        assert np.allclose(lp3.rows.T @ lp3.rows, np.eye(3), atol=1e-8)

    def test_zero_spectrum_rows(self):
        lp = latent_positions(top_eigenpairs(empty(2), 1), 1)
        assert np.all(lp.rows == 0.0)

    def test_too_many_dimensions(self):
        with pytest.raises(InputError):
            latent_positions(top_eigenpairs(k(3), 1), 2)
        with pytest.raises(InputError):
            latent_positions(top_eigenpairs(k(3), 1), 1, "bogus")


class TestComputeAll:
    def test_k3_everything(self):
        b = compute_all(k(3), ComputeConfig(K=3, lp_dim=1))
        assert vals(b.vectors["deg"]) == [2, 2, 2]
        assert vals(b.vectors["ss1"]) == [3, 3, 3]
        assert np.allclose(b.vectors["nl3"].values, 1.0, atol=1e-9)
        assert np.allclose(b.vectors["cc"].values, 1.0, atol=1e-9)
        assert np.allclose(b.lp.rows[:, 0], 0.8165, atol=1e-4)
        assert b.eigensolver_calls == 1
        assert b.degree_calls == 1
        assert "eigen" in b.timings

    def test_degree_only_skips_eigensolver(self):
        b = compute_all(k(3), ComputeConfig(which=("deg",)))
        assert set(b.vectors) == {"deg"}
        assert b.eigensolver_calls == 0
        assert b.eigenvalues is None and b.lp is None

    def test_independent_recomputes_prerequisites(self):
        b = compute_all(k(4), ComputeConfig(K=4), mode="independent")
        assert b.eigensolver_calls == 3
        assert b.degree_calls == 2

    def test_modes_agree(self):
        g = erdos_renyi(120, 0.1, seed=5)
        cfg = ComputeConfig(K=10, lp_dim=4)
        a = compute_all(g, cfg, mode="chained")
        b = compute_all(g, cfg, mode="independent")
        for key in ("deg", "ss1"):
            assert np.array_equal(a.vectors[key].values, b.vectors[key].values)
        for key in ("nl3", "cc"):
            assert np.max(np.abs(a.vectors[key].values - b.vectors[key].values)) <= 1e-12
        assert np.max(np.abs(a.lp.rows - b.lp.rows)) <= 1e-12

    def test_default_k_clamped_on_small_graph(self):
        b = compute_all(k(3))
        assert b.K == 3 and b.lp_dim == 3

    @pytest.mark.parametrize("kwargs", [
        {"which": ("deg", "bogus")},
        {"which": ()},
        {"K": 0},
        {"K": 3, "lp_dim": 4},
        {"scale_mode": "half"},
    ])
    def test_config_validation(self, kwargs):
        with pytest.raises(InputError):
            ComputeConfig(**kwargs)

    def test_unknown_mode(self):
        with pytest.raises(InputError):
            compute_all(k(3), mode="parallel")


@given(graphs_with_permutation())
@settings(deadline=None)
def test_exact_invariants_equivariant(gp):
    g, pi = gp
    h = permute(g, pi)
    for fn in (degree, scan_statistic_1, local_triangles_exact):
        a, b = fn(g).values, fn(h).values
        assert np.array_equal(b[pi], a)


def test_spectral_invariants_equivariant_for_simple_spectrum():
    rng = np.random.default_rng(4)
    g = erdos_renyi(80, 0.2, seed=9)
    pi = rng.permutation(g.n)
    ea, eb = top_eigenpairs(g, 5), top_eigenpairs(permute(g, pi), 5)
    assert np.min(np.abs(np.diff(np.abs(ea.values)))) > 1e-3
    na, nb = local_triangles_approx(ea).values, local_triangles_approx(eb).values
    assert np.allclose(nb[pi], na, atol=1e-8)
    la, lb = latent_positions(ea, 5).rows, latent_positions(eb, 5).rows
    # columns are defined up to sign; the sign rule may pick either after relabeling
    signs = np.sign(np.sum(lb[pi] * la, axis=0))
    assert np.allclose(lb[pi] * signs, la, atol=1e-8)
