import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import graphs
from pearlpe.encoder import GnnConfig, LayerSpec, identity_config, scalar_layer
from pearlpe.filters import FilterBank
from pearlpe.generators import complete_graph, cycle_graph, erdos_renyi
from pearlpe.graph import GsoKind, GsoMatrix, build_gso
from pearlpe.spectral import (EigenDecomp, _round_robin, eigenspace_projector,
                              eigenvalue_features, group_eigenvalues, spe_equiv_check,
                              spe_reference, symmetric_eig, verify_prop1)
from pearlpe.suites import prop1_suite, spe_suite


def _check_invariants(e, s):
    v = e.eigenvectors
    n = e.n
    assert np.abs(v.T @ v - np.eye(n)).max(initial=0) <= 1e-9
    assert np.abs(e.reconstruct() - s).max(initial=0) <= 1e-8 * max(1e-300, np.abs(s).max(initial=0)) or n == 0
    assert np.all(np.diff(e.eigenvalues) >= 0)


class TestSymmetricEig:
    def test_k2(self, k2):
        np.testing.assert_allclose(symmetric_eig(build_gso(k2, "adjacency")).eigenvalues, [-1, 1], atol=1e-15)

    def test_c4(self, c4):
        np.testing.assert_allclose(symmetric_eig(build_gso(c4, "adjacency")).eigenvalues,
                                   [-2, 0, 0, 2], atol=1e-14)

    @pytest.mark.parametrize("n", [3, 5, 8, 17, 41])
    def test_cycle_spectrum(self, n):
        lam = symmetric_eig(build_gso(cycle_graph(n), "adjacency")).eigenvalues
        np.testing.assert_allclose(lam, np.sort(2 * np.cos(2 * np.pi * np.arange(n) / n)), atol=1e-12)

    @settings(max_examples=25, deadline=None)
    @given(graphs(min_nodes=2, max_nodes=20, connected=True))
    def test_normalized_laplacian_kernel(self, g):
        lam = symmetric_eig(build_gso(g, "normalized_laplacian")).eigenvalues
        assert abs(lam[0]) <= 1e-9

    def test_rejects_asymmetric(self, p3):
        with pytest.raises(ValueError):
            symmetric_eig(build_gso(p3, "random_walk"))
        with pytest.raises(ValueError):
            symmetric_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_size_guard(self):
        with pytest.raises(ValueError, match="512"):
            symmetric_eig(np.eye(513))

    @pytest.mark.parametrize("a", [np.zeros((6, 6)), np.diag([3.0, 1.0, 2.0]), np.eye(1), np.zeros((0, 0))])
    def test_trivial_inputs(self, a):
        e = symmetric_eig(a)
        np.testing.assert_allclose(e.eigenvalues, np.sort(np.diag(a)))
        _check_invariants(e, a)

    def test_tiny_offdiagonal_is_stable(self):
        a = np.array([[1.0, 1e-170], [1e-170, 1.0 + 1e-300]])
        with np.errstate(all="raise"):
            e = symmetric_eig(a)
        np.testing.assert_allclose(e.eigenvalues, [1, 1])

    @pytest.mark.parametrize("n", [4, 7, 16, 33, 64])
    def test_dense_random_against_lapack(self, n):
        rng = np.random.default_rng(n)
        a = rng.standard_normal((n, n))
        a = a + a.T
        e = symmetric_eig(a)
        _check_invariants(e, a)
        np.testing.assert_allclose(e.eigenvalues, np.linalg.eigvalsh(a), atol=1e-11)

    def test_random_graph_suite(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            n = int(rng.integers(4, 65))
            g = erdos_renyi(n, float(rng.uniform(0.05, 0.5)), int(rng.integers(2**31)), connected=True)
            kind = [k for k in GsoKind if k.symmetric][int(rng.integers(4))]
            s = build_gso(g, kind)
            _check_invariants(symmetric_eig(s), s.toarray())

    @pytest.mark.parametrize("m", [2, 4, 6, 10])
    def test_round_robin_covers_each_pair_once(self, m):
        seen = set()
        for p, q in _round_robin(m):
            assert len(set(p.tolist()) | set(q.tolist())) == m
            seen |= set(zip(p.tolist(), q.tolist()))
        assert len(seen) == m * (m - 1) // 2


class TestGrouping:
    def test_c4(self, c4):
        e = symmetric_eig(build_gso(c4, "adjacency"))
        gr = group_eigenvalues(e, 1e-6)
        assert gr.q == 3
        assert gr.multiplicities().tolist() == [1, 2, 1]
        np.testing.assert_allclose(gr.values, [-2, 0, 2], atol=1e-12)

    def test_all_distinct(self):
        e = EigenDecomp(np.array([0.0, 1.0, 2.5]), np.eye(3))
        assert group_eigenvalues(e).q == 3

    def test_k3(self, k3):
        gr = group_eigenvalues(symmetric_eig(build_gso(k3, "adjacency")))
        assert gr.multiplicities().tolist() == [2, 1]
        np.testing.assert_allclose(gr.values, [-1, 2], atol=1e-12)

    def test_tol_must_be_positive(self, k3):
        with pytest.raises(ValueError):
            group_eigenvalues(symmetric_eig(build_gso(k3, "adjacency")), 0.0)

    @settings(max_examples=20, deadline=None)
    @given(graphs(min_nodes=1, max_nodes=15))
    def test_partition_and_gaps(self, g):
        e = symmetric_eig(build_gso(g, "adjacency"))
        gr = group_eigenvalues(e)
        idx = np.concatenate(gr.groups)
        assert sorted(idx.tolist()) == list(range(g.n_nodes))
        for grp in gr.groups:
            assert np.ptp(e.eigenvalues[grp]) <= gr.tol * len(grp)
        assert np.all(np.diff(gr.values) > gr.tol)


class TestProjectors:
    def test_scalar_operator(self):
        e = symmetric_eig(3.0 * np.eye(4))
        gr = group_eigenvalues(e)
        np.testing.assert_allclose(eigenspace_projector(e, gr, 0), np.eye(4), atol=1e-14)

    def test_c4_zero_eigenspace(self, c4):
        e = symmetric_eig(build_gso(c4, "adjacency"))
        gr = group_eigenvalues(e)
        p = eigenspace_projector(e, gr, 1)
        assert np.trace(p) == pytest.approx(2.0, abs=1e-12)
        assert np.linalg.matrix_rank(p, tol=1e-9) == 2

    @settings(max_examples=20, deadline=None)
    @given(graphs(min_nodes=1, max_nodes=16))
    def test_complete_idempotent_traces(self, g):
        e = symmetric_eig(build_gso(g, "adjacency"))
        gr = group_eigenvalues(e)
        total = np.zeros((g.n_nodes, g.n_nodes))
        for f in range(gr.q):
            p = eigenspace_projector(e, gr, f)
            assert np.abs(p @ p - p).max() <= 1e-9
            assert np.abs(p - p.T).max() <= 1e-12
            assert abs(np.trace(p) - len(gr.groups[f])) <= 1e-9
            total += p
        assert np.abs(total - np.eye(g.n_nodes)).max(initial=0) <= 1e-9

    def test_projector_is_basis_invariant(self, c4):
        # rotate the basis inside the 2-dimensional eigenspace; the projector stays put
        e = symmetric_eig(build_gso(c4, "adjacency"))
        gr = group_eigenvalues(e)
        t = 0.7
        rot = np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])
        v = e.eigenvectors.copy()
        v[:, gr.groups[1]] = v[:, gr.groups[1]] @ rot
        rotated = EigenDecomp(e.eigenvalues, v)
        np.testing.assert_allclose(eigenspace_projector(rotated, gr, 1), eigenspace_projector(e, gr, 1),
                                   atol=1e-14)


class TestEigenvalueFeatures:
    def test_c4(self, c4):
        e = symmetric_eig(build_gso(c4, "adjacency"))
        feats = eigenvalue_features(e, group_eigenvalues(e))
        assert [(round(a, 12) + 0.0, m) for a, m in feats] == [(-2.0, 1), (0.0, 2), (2.0, 1)]

    def test_k2(self, k2):
        e = symmetric_eig(build_gso(k2, "adjacency"))
        feats = eigenvalue_features(e, group_eigenvalues(e))
        assert [(round(a, 12), m) for a, m in feats] == [(-1.0, 1), (1.0, 1)]

    def test_zero_operator(self):
        e = symmetric_eig(np.zeros((3, 3)))
        assert eigenvalue_features(e, group_eigenvalues(e)) == [(0.0, 3)]


class TestProp1:
    def test_identity_layer(self, rng):
        g = erdos_renyi(8, 0.4, seed=1)
        x = rng.standard_normal((8, 1))
        assert verify_prop1(identity_config(), build_gso(g, "adjacency"), x) <= 1e-12

    def test_random_layer_n10(self, rng):
        g = erdos_renyi(10, 0.4, seed=2)
        bank = rng.uniform(-0.3, 0.3, size=(3, 2, 3))
        cfg = GnnConfig((LayerSpec(FilterBank(bank), "relu"),))
        assert verify_prop1(cfg, build_gso(g, "adjacency"), rng.standard_normal((10, 2))) <= 1e-8

    def test_k5_scalar_on_c6(self, rng):
        cfg = GnnConfig((scalar_layer([0, 1, -1 / 2, 1 / 3, -1 / 4], "relu"),))
        assert verify_prop1(cfg, build_gso(cycle_graph(6), "adjacency"), rng.standard_normal(6)) <= 1e-8

    def test_rejects_multilayer_and_asymmetric(self, p3):
        cfg2 = GnnConfig((scalar_layer([1], "relu"), scalar_layer([1], "relu")))
        with pytest.raises(ValueError):
            verify_prop1(cfg2, build_gso(p3, "adjacency"), np.ones(3))
        with pytest.raises(ValueError):
            verify_prop1(GnnConfig((scalar_layer([1], "relu"),), "random_walk"),
                         build_gso(p3, "random_walk"), np.ones(3))

    def test_suite(self):
        rep = prop1_suite(seed=3, cases=50)
        assert rep.passed, rep.summary


class TestSpe:
    def test_constant_alpha_identity_rho(self, c4):
        s = build_gso(c4, "adjacency")
        out = spe_reference(symmetric_eig(s), [(1.0,)], identity_config(), s)
        np.testing.assert_allclose(out, np.ones((4, 1)), atol=1e-13)

    def test_linear_alpha_gives_degrees(self, c4):
        s = build_gso(c4, "adjacency")
        out = spe_reference(symmetric_eig(s), [(0.0, 1.0)], identity_config(), s)
        np.testing.assert_allclose(out.ravel(), [2, 2, 2, 2], atol=1e-13)

    def test_width_mismatch(self, c4):
        s = build_gso(c4, "adjacency")
        with pytest.raises(ValueError, match="alphas"):
            spe_reference(symmetric_eig(s), [(1.0,), (0.0, 1.0)], identity_config(), s)

    def test_linear_alpha_on_k3(self, k3):
        assert spe_equiv_check(k3, [(0.0, 1.0)], identity_config()) <= 1e-12

    def test_suite(self):
        rep = spe_suite(seed=4, cases=20, n=12)
        assert rep.passed, rep.summary

    def test_mismatched_coefficients_detected(self):
        g = erdos_renyi(12, 0.4, seed=0, connected=True)
        alphas = [(0.2, 0.5, -0.3, 0.1)]
        wrong = [(0.2, 0.5, -0.3, 0.2)]
        assert spe_equiv_check(g, alphas, identity_config(), basis_alphas=wrong) > 1e-3

    def test_non_finite_alpha(self, k3):
        with pytest.raises(ValueError):
            spe_equiv_check(k3, [(0.0, np.nan)], identity_config())
