import numpy as np
import pytest
import scipy.sparse as sp

from pearlpe.generators import (complete_graph, cycle_graph, erdos_renyi, path_graph,
                                random_permutation)
from pearlpe.graph import Graph, degrees
from pearlpe.validation import (check_graph, check_graphs, check_permutation,
                                check_positive_int, check_signal)


class TestCheckGraph:
    def test_passthrough(self, k3):
        assert check_graph(k3) is k3

    def test_dense_and_sparse(self):
        a = np.array([[0, 1, 1], [1, 0, 0], [1, 0, 0]])
        assert check_graph(a) == Graph.from_edges(3, [(0, 1), (0, 2)])
        assert check_graph(sp.csr_matrix(a)) == check_graph(a)

    @pytest.mark.parametrize("a,msg", [
        (np.ones((2, 3)), "square"),
        (np.array([[0, 2], [2, 0]]), "0 or 1"),
        (np.array([[0, 1], [0, 0]]), "symmetric"),
    ])
    def test_rejects(self, a, msg):
        with pytest.raises(ValueError, match=msg):
            check_graph(a)

    def test_type_error(self):
        with pytest.raises(TypeError):
            check_graph("0 1")

    def test_graphs(self, k3):
        assert check_graphs(k3) == [k3]
        with pytest.raises(ValueError):
            check_graphs([])


class TestOtherChecks:
    def test_signal(self):
        assert check_signal([1, 2, 3], 3).shape == (3, 1)
        with pytest.raises(ValueError, match="rows"):
            check_signal(np.ones((2, 1)), 3)
        with pytest.raises(ValueError, match="features"):
            check_signal(np.ones((3, 2)), 3, width=1)
        with pytest.raises(ValueError, match="non-finite"):
            check_signal([1.0, np.nan], 2)

    def test_permutation(self):
        assert check_permutation([2, 0, 1], 3).tolist() == [2, 0, 1]
        for bad in ([0, 0, 1], [0, 1], [0.0, 1.0, 2.0]):
            with pytest.raises(ValueError):
                check_permutation(bad, 3)

    @pytest.mark.parametrize("bad", [0, -1, 1.5, True, "3"])
    def test_positive_int(self, bad):
        with pytest.raises(ValueError):
            check_positive_int("M", bad)


class TestGenerators:
    def test_shapes(self):
        assert path_graph(4).n_edges == 3
        assert cycle_graph(5).n_edges == 5
        assert complete_graph(5).n_edges == 10
        assert set(degrees(cycle_graph(7)).tolist()) == {2}

    def test_erdos_renyi_seeded(self):
        assert erdos_renyi(20, 0.3, seed=1) == erdos_renyi(20, 0.3, seed=1)
        assert erdos_renyi(20, 0.3, seed=1) != erdos_renyi(20, 0.3, seed=2)

    def test_connected_option(self):
        g = erdos_renyi(30, 0.0, seed=3, connected=True)
        assert g.n_edges == 29 and degrees(g).min() >= 1

    def test_random_permutation(self):
        p = random_permutation(10, seed=0)
        assert sorted(p.tolist()) == list(range(10))
