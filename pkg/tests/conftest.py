import numpy as np
import pytest
from hypothesis import strategies as st

from pearlpe.generators import complete_graph, cycle_graph, erdos_renyi, path_graph
from pearlpe.graph import Graph


@pytest.fixture
def k2():
    return complete_graph(2)


@pytest.fixture
def k3():
    return complete_graph(3)


@pytest.fixture
def k4():
    return complete_graph(4)


@pytest.fixture
def p3():
    return path_graph(3)


@pytest.fixture
def c4():
    return cycle_graph(4)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@st.composite
def graphs(draw, min_nodes=1, max_nodes=12, connected=False):
    n = draw(st.integers(min_nodes, max_nodes))
    p = draw(st.floats(0.0, 1.0))
    seed = draw(st.integers(0, 2**32 - 1))
    return erdos_renyi(n, p, seed, connected=connected)


@st.composite
def edge_lists(draw, max_nodes=10):
    n = draw(st.integers(1, max_nodes))
    pairs = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=40))
    return n, pairs


def dense_adjacency(g: Graph):
    a = np.zeros((g.n_nodes, g.n_nodes))
    for u, v in g.edges:
        a[u, v] = a[v, u] = 1.0
    return a
