"""Input checks shared by the estimators, the harness and the CLI."""

from __future__ import annotations

import numbers

import numpy as np
import scipy.sparse as sp

from .graph import Graph

__all__ = ["check_graph", "check_graphs", "check_permutation", "check_positive_int", "check_signal"]


def check_graph(g):
    """Return ``g`` as a :class:`Graph`.

    Also accepts a square symmetric 0/1 adjacency matrix (dense or scipy sparse).
    """
    if isinstance(g, Graph):
        return g
    if sp.issparse(g) or isinstance(g, np.ndarray):
        a = sp.coo_matrix(g)
        if a.shape[0] != a.shape[1]:
            raise ValueError(f"adjacency must be square, got {a.shape}")
        if a.nnz and not np.all(a.data == 1):
            raise ValueError("adjacency entries must be 0 or 1 (weighted graphs are not supported)")
        if (abs(a - a.T)).nnz:
            raise ValueError("adjacency must be symmetric")
        return Graph.from_edges(a.shape[0], np.column_stack([a.row, a.col]))
    raise TypeError(f"expected a Graph or an adjacency matrix, got {type(g).__name__}")


def check_graphs(X):
    """Normalize a single graph or a sequence of graphs to a list."""
    if isinstance(X, (Graph, np.ndarray)) or sp.issparse(X):
        return [check_graph(X)]
    graphs = [check_graph(g) for g in X]
    if not graphs:
        raise ValueError("need at least one graph")
    return graphs


def check_signal(x, n_nodes, width=None):
    """A finite ``(N, F)`` float array; 1-D input becomes one column."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim not in (2, 3) or x.shape[0] != n_nodes:
        raise ValueError(f"signal must have {n_nodes} rows, got shape {x.shape}")
    if width is not None and x.shape[-1] != width:
        raise ValueError(f"signal must have {width} features, got {x.shape[-1]}")
    if not np.all(np.isfinite(x)):
        raise ValueError("signal contains non-finite values")
    return x


def check_permutation(perm, n):
    perm = np.asarray(perm)
    if perm.shape != (n,) or not np.issubdtype(perm.dtype, np.integer):
        raise ValueError(f"permutation must be {n} integers")
    if not np.array_equal(np.sort(perm), np.arange(n)):
        raise ValueError("not a permutation of range(n)")
    return perm.astype(np.int64)


def check_positive_int(name, value):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return int(value)
