"""Small deterministic graph families used by tests, the CLI and the harness."""

from __future__ import annotations

import numpy as np

from .graph import Graph

__all__ = ["complete_graph", "cycle_graph", "erdos_renyi", "path_graph", "random_permutation"]


def path_graph(n):
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n):
    if n < 3:
        raise ValueError("a cycle needs at least 3 nodes")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n):
    iu = np.triu_indices(n, 1)
    return Graph.from_edges(n, np.column_stack(iu))


def erdos_renyi(n, p, seed=None, connected=False):
    """G(n, p). With ``connected=True`` a random spanning path is added first,
    so the graph is connected and has no isolated nodes."""
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(iu.size) < p
    edges = np.column_stack([iu[keep], ju[keep]])
    if connected and n > 1:
        order = rng.permutation(n)
        edges = np.concatenate([edges, np.column_stack([order[:-1], order[1:]])])
    return Graph.from_edges(n, edges)


def random_permutation(n, seed=None):
    return np.random.default_rng(seed).permutation(n)
