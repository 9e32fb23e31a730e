import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import graphs
from pearlpe.filters import (FilterBank, FilterSpec, IllPosedError, apply_filter,
                             apply_filter_bank, design_interpolating_filter, filter_norm_bound,
                             frequency_response, lipschitz_constants)
from pearlpe.generators import complete_graph, erdos_renyi
from pearlpe.graph import GsoKind, build_gso
from pearlpe.spectral import symmetric_eig

taps = st.lists(st.floats(-2, 2, allow_nan=False), min_size=1, max_size=5)


class TestFilterSpec:
    def test_rejects_empty_and_nonfinite(self):
        with pytest.raises(ValueError):
            FilterSpec(())
        with pytest.raises(ValueError):
            FilterSpec((1.0, np.inf))

    def test_order(self):
        assert FilterSpec((0, 1, 2)).order == 3


class TestApplyFilter:
    def test_identity(self, rng, c4):
        x = rng.standard_normal((4, 2))
        np.testing.assert_array_equal(apply_filter(FilterSpec((1,)), build_gso(c4, "adjacency"), x), x)

    def test_one_hop(self, c4):
        y = apply_filter(FilterSpec((0, 1)), build_gso(c4, "adjacency"), np.eye(4)[0])
        assert y.tolist() == [0, 1, 0, 1]

    def test_two_hop_on_path(self, p3):
        y = apply_filter(FilterSpec((0, 0, 1)), build_gso(p3, "adjacency"), np.ones(3))
        assert y.tolist() == [2, 2, 2]

    def test_kind_mismatch(self, p3):
        with pytest.raises(ValueError):
            apply_filter(FilterSpec((0, 1), "laplacian"), build_gso(p3, "adjacency"), np.ones(3))

    def test_uses_order_minus_one_products(self, p3, monkeypatch):
        import pearlpe.filters as mod

        calls = []
        real = mod.spmv
        monkeypatch.setattr(mod, "spmv", lambda s, x: calls.append(1) or real(s, x))
        apply_filter(FilterSpec((1, 2, 3, 4, 5)), build_gso(p3, "adjacency"), np.ones(3))
        assert len(calls) == 4


class TestApplyFilterBank:
    def test_scalar_bank_equals_filter(self, rng):
        g = erdos_renyi(8, 0.4, seed=2)
        s = build_gso(g, "adjacency")
        f = FilterSpec(tuple(rng.standard_normal(4)))
        x = rng.standard_normal((8, 1))
        np.testing.assert_allclose(apply_filter_bank(FilterBank.from_filter(f), s, x),
                                   apply_filter(f, s, x), atol=1e-13)

    def test_identity_bank(self, rng, p3):
        x = rng.standard_normal((3, 3))
        bank = FilterBank(np.concatenate([np.eye(3)[None], np.zeros((2, 3, 3))]))
        np.testing.assert_allclose(apply_filter_bank(bank, build_gso(p3, "adjacency"), x), x)

    @pytest.mark.parametrize("seed", range(5))
    def test_dense_reference(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 17))
        g = erdos_renyi(n, 0.3, seed=seed, connected=True)
        kind = list(GsoKind)[seed % 5]
        s = build_gso(g, kind)
        h = rng.standard_normal((4, 3, 2))
        x = rng.standard_normal((n, 3))
        dense = s.toarray()
        ref = sum(np.linalg.matrix_power(dense, k) @ x @ h[k] for k in range(4))
        np.testing.assert_allclose(apply_filter_bank(FilterBank(h), s, x), ref, rtol=1e-10, atol=1e-10)

    def test_width_mismatch(self, p3):
        with pytest.raises(ValueError, match="input features"):
            apply_filter_bank(FilterBank(np.ones((2, 2, 1))), build_gso(p3, "adjacency"), np.ones((3, 3)))


class TestFrequencyResponse:
    def test_constant(self):
        assert frequency_response(FilterSpec((1, 0)), 123.0) == 1.0

    def test_linear(self):
        assert frequency_response(FilterSpec((0, 1)), -1.0) == -1.0

    def test_fixed_taps_at_two(self):
        # 2 - 2 + 8/3 - 4
        val = frequency_response(FilterSpec((0, 1, -1 / 2, 1 / 3, -1 / 4)), 2.0)
        assert val == pytest.approx(-4.0 / 3.0, abs=1e-14)

    def test_vectorized(self):
        np.testing.assert_allclose(frequency_response((1, 2), [0.0, 1.0, 2.0]), [1, 3, 5])


class TestInterpolatingFilter:
    def test_two_point(self):
        d = design_interpolating_filter([-1, 1], [0, 1])
        np.testing.assert_allclose(d.filter.coeffs, [0.5, 0.5], atol=1e-15)

    def test_constant(self):
        np.testing.assert_allclose(design_interpolating_filter([0, 1, 2], [1, 1, 1]).filter.coeffs,
                                   [1, 0, 0], atol=1e-14)

    def test_c4_eigenspace_indicator(self):
        mus = [-2.0, 0.0, 2.0]
        d = design_interpolating_filter(mus, [0, 1, 0])
        np.testing.assert_allclose(frequency_response(d.filter, mus), [0, 1, 0], atol=1e-12)
        assert not d.ill_conditioned

    def test_coincident_nodes(self):
        with pytest.raises(IllPosedError):
            design_interpolating_filter([0.0, 1.0, 1.0 + 1e-12], [0, 1, 2])

    def test_ill_conditioned_flag(self):
        mus = np.linspace(0, 1, 20)
        d = design_interpolating_filter(mus, np.sin(mus))
        assert d.ill_conditioned and d.condition > 1e12

    @settings(max_examples=50)
    @given(st.lists(st.floats(-3, 3), min_size=1, max_size=7, unique=True), st.integers(0, 1000))
    def test_hits_targets(self, mus, seed):
        mus = np.array(mus)
        if len(mus) > 1 and np.min(np.diff(np.sort(mus))) < 0.1:
            return
        gammas = np.random.default_rng(seed).uniform(-1, 1, len(mus))
        d = design_interpolating_filter(mus, gammas)
        assert d.residual <= 1e-8 * max(1.0, np.abs(gammas).max())


class TestLipschitz:
    def test_constant_filter(self):
        assert lipschitz_constants(FilterSpec((3.0,)), (-1, 1)) == (0.0, 0.0)

    def test_identity_response(self):
        lip, integral = lipschitz_constants(FilterSpec((0, 1)), (-1, 1))
        assert lip == pytest.approx(1.0, abs=1e-12)
        assert integral == pytest.approx(1.0, abs=1e-12)

    def test_square_on_unit_interval(self):
        lip, _ = lipschitz_constants(FilterSpec((0, 0, 1)), (0, 1))
        assert lip == pytest.approx(2.0, abs=1e-12)

    def test_empty_interval(self):
        with pytest.raises(ValueError):
            lipschitz_constants(FilterSpec((0, 1)), (1, 1))


class TestNormBound:
    def test_identity(self, k4):
        for method in ("eigen", "degree"):
            assert filter_norm_bound(FilterSpec((1,)), build_gso(k4, "adjacency"), method).value == pytest.approx(1.0)

    def test_normalized_adjacency(self):
        g = erdos_renyi(12, 0.3, seed=4, connected=True)
        b = filter_norm_bound(FilterSpec((0, 1), "normalized_adjacency"),
                              build_gso(g, "normalized_adjacency"))
        assert b.value <= 1 + 1e-12 and b.path == "eigen"

    def test_k4_spectral_radius(self):
        s = build_gso(complete_graph(4), "adjacency")
        assert filter_norm_bound(FilterSpec((0, 1)), s, "eigen").value == pytest.approx(3.0, abs=1e-12)
        assert filter_norm_bound(FilterSpec((0, 1)), s, "degree").value == 3.0

    def test_random_walk_uses_degree_path(self, k3):
        assert filter_norm_bound(FilterSpec((0, 1)), build_gso(k3, "random_walk")).path == "degree"

    @settings(max_examples=30)
    @given(graphs(min_nodes=2, max_nodes=10), taps)
    def test_degree_path_dominates_eigen_path(self, g, h):
        s = build_gso(g, "adjacency")
        f = FilterSpec(tuple(h))
        assert filter_norm_bound(f, s, "eigen").value <= filter_norm_bound(f, s, "degree").value + 1e-9


@settings(max_examples=40)
@given(graphs(min_nodes=1, max_nodes=12, connected=True), taps, st.integers(0, 2**32 - 1))
def test_spectral_commutation(g, h, seed):
    s = build_gso(g, "normalized_laplacian" if g.n_nodes > 1 else "adjacency")
    f = FilterSpec(tuple(h), s.kind)
    x = np.random.default_rng(seed).standard_normal(g.n_nodes)
    e = symmetric_eig(s)
    ref = e.eigenvectors @ (frequency_response(f, e.eigenvalues) * (e.eigenvectors.T @ x))
    y = apply_filter(f, s, x)
    assert np.max(np.abs(y - ref)) <= 1e-9 * max(1.0, np.max(np.abs(ref)))


@settings(max_examples=40)
@given(graphs(min_nodes=2, max_nodes=12), taps, st.floats(-3, 3), st.floats(-3, 3),
       st.integers(0, 2**32 - 1))
def test_linearity(g, h, a, b, seed):
    s = build_gso(g, "adjacency")
    f = FilterSpec(tuple(h))
    x, y = np.random.default_rng(seed).standard_normal((2, g.n_nodes))
    lhs = apply_filter(f, s, a * x + b * y)
    rhs = a * apply_filter(f, s, x) + b * apply_filter(f, s, y)
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * max(1.0, np.max(np.abs(rhs)), np.max(np.abs(lhs)))
