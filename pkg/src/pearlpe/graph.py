"""Undirected graphs, degree bookkeeping and graph shift operators.

A :class:`Graph` is immutable and canonical: edges are stored once as
``(u, v)`` with ``u < v``, sorted, and the neighbor lists are kept in CSR
form (``indptr`` / ``indices``). Every shift operator is built from that
structure and applied sparsely, so ``S @ x`` costs ``O(|E| F)``.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

__all__ = [
    "Graph",
    "GraphParseError",
    "GsoDomainError",
    "GsoKind",
    "GsoMatrix",
    "build_gso",
    "degrees",
    "load_graph",
    "permute_graph",
    "read_graph",
    "spmv",
]


class GraphParseError(ValueError):
    """Malformed edge-list text. ``lineno`` is 1-based (0 for whole-file errors)."""

    def __init__(self, message, lineno=0):
        self.lineno = lineno
        prefix = f"line {lineno}: " if lineno else ""
        super().__init__(prefix + message)


class GsoDomainError(ValueError):
    """A degree-normalized operator was requested on a graph with an isolated node."""

    def __init__(self, kind, node):
        self.kind = kind
        self.node = node
        super().__init__(
            f"{kind.value} requires every degree > 0, but node {node} is isolated"
        )


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph on nodes ``0 .. n_nodes - 1``.

    Build with :meth:`from_edges`; the raw constructor expects canonical input.

    Attributes
    ----------
    n_nodes : int
    edges : ndarray of shape (n_edges, 2)
        Undirected edges with ``u < v``, lexicographically sorted.
    indptr, indices : ndarray
        CSR neighbor lists; ``indices[indptr[v]:indptr[v + 1]]`` is sorted.
    dropped_self_loops : int
        How many self-loops were discarded while canonicalizing.
    """

    n_nodes: int
    edges: np.ndarray
    indptr: np.ndarray = field(repr=False)
    indices: np.ndarray = field(repr=False)
    dropped_self_loops: int = 0

    @classmethod
    def from_edges(cls, n_nodes, edges=()):
        """Canonicalize an edge collection: symmetrize, dedupe, drop self-loops."""
        n_nodes = int(n_nodes)
        if n_nodes < 0:
            raise ValueError("n_nodes must be non-negative")
        e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                       dtype=np.int64).reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= n_nodes):
            raise ValueError(f"edge endpoints must lie in [0, {n_nodes})")
        loops = e[:, 0] == e[:, 1]
        e = np.sort(e[~loops], axis=1)
        e = np.unique(e, axis=0) if e.size else e.reshape(0, 2)
        both = np.concatenate([e, e[:, ::-1]]) if e.size else e
        order = np.lexsort((both[:, 1], both[:, 0])) if both.size else np.array([], int)
        both = both[order]
        counts = np.bincount(both[:, 0], minlength=n_nodes) if both.size else np.zeros(n_nodes, int)
        indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
        indices = both[:, 1].astype(np.int64) if both.size else np.zeros(0, np.int64)
        for arr in (e, indptr, indices):
            arr.setflags(write=False)
        return cls(n_nodes, e, indptr, indices, int(loops.sum()))

    @property
    def n_edges(self):
        return len(self.edges)

    def neighbors(self, v):
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def adjacency(self):
        """Sparse 0/1 adjacency matrix (CSR, float64)."""
        data = np.ones(len(self.indices))
        return sp.csr_matrix((data, self.indices, self.indptr),
                             shape=(self.n_nodes, self.n_nodes))

    def to_text(self):
        lines = [f"N {self.n_nodes}"]
        lines += [f"{u} {v}" for u, v in self.edges]
        return "\n".join(lines) + "\n"

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n_nodes == other.n_nodes and np.array_equal(self.edges, other.edges)

    def __hash__(self):
        return hash((self.n_nodes, self.edges.tobytes()))


def degrees(g):
    """Node degrees ``d[v] = |N(v)|``."""
    return np.diff(g.indptr)


def permute_graph(g, perm):
    """Relabel nodes so that old node ``v`` becomes ``perm[v]``."""
    perm = np.asarray(perm, dtype=np.int64)
    if sorted(perm.tolist()) != list(range(g.n_nodes)):
        raise ValueError("perm must be a permutation of range(n_nodes)")
    return Graph.from_edges(g.n_nodes, perm[g.edges] if g.n_edges else [])


_INT = re.compile(r"[+-]?\d+\Z")


def _parse_int(tok, lineno):
    if not _INT.match(tok):
        raise GraphParseError(f"non-integer token {tok!r}", lineno)
    val = int(tok)
    if val < 0:
        raise GraphParseError(f"negative index {val}", lineno)
    return val


def load_graph(source):
    """Parse edge-list text.

    Format: an optional header (``N <count>`` or a lone ``<count>`` as the first
    data line), then one ``u v`` pair per line. ``#`` starts a comment. When no
    header is present ``N = max index + 1``.

    Self-loops are dropped and counted in ``Graph.dropped_self_loops``.
    """
    n_header = None
    pairs = []
    seen_data = False
    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if not seen_data and (len(toks) == 1 or (len(toks) == 2 and toks[0] in ("N", "n"))):
            n_header = _parse_int(toks[-1], lineno)
            seen_data = True
            continue
        seen_data = True
        if len(toks) != 2:
            raise GraphParseError(f"expected 'u v', got {line!r}", lineno)
        u, v = (_parse_int(t, lineno) for t in toks)
        if n_header is not None and max(u, v) >= n_header:
            raise GraphParseError(f"index {max(u, v)} out of range for N={n_header}", lineno)
        pairs.append((u, v))
    if n_header is None and not pairs:
        raise GraphParseError("empty graph file")
    n = n_header if n_header is not None else max(max(p) for p in pairs) + 1
    return Graph.from_edges(n, pairs)


def read_graph(path):
    return load_graph(Path(path).read_text())


class GsoKind(str, enum.Enum):
    """The five neighborhood aggregations a message-passing layer can use."""

    ADJACENCY = "adjacency"
    LAPLACIAN = "laplacian"
    NORMALIZED_ADJACENCY = "normalized_adjacency"
    NORMALIZED_LAPLACIAN = "normalized_laplacian"
    RANDOM_WALK = "random_walk"

    @property
    def symmetric(self):
        return self is not GsoKind.RANDOM_WALK

    @property
    def degree_normalized(self):
        return self not in (GsoKind.ADJACENCY, GsoKind.LAPLACIAN)

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).lower().replace("-", "_")
        aliases = {"a": "adjacency", "adj": "adjacency", "l": "laplacian",
                   "rw": "random_walk", "norm_adj": "normalized_adjacency",
                   "norm_lap": "normalized_laplacian"}
        return cls(aliases.get(key, key))


@dataclass(frozen=True, eq=False)
class GsoMatrix:
    """A graph shift operator in sparse (CSR) form, tagged with its kind."""

    kind: GsoKind
    matrix: sp.csr_matrix = field(repr=False)
    symmetric: bool = True

    @property
    def n(self):
        return self.matrix.shape[0]

    def toarray(self):
        return self.matrix.toarray()

    def entries(self):
        """``(row, col, weight)`` triples of the stored nonzeros."""
        coo = self.matrix.tocoo()
        return list(zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()))

    def inf_norm(self):
        """Maximum absolute row sum; bounds the spectral radius of ``S``."""
        if self.n == 0:
            return 0.0
        return float(np.abs(self.matrix).sum(axis=1).max())

    @classmethod
    def from_dense(cls, kind, dense, symmetric=None):
        dense = np.asarray(dense, dtype=float)
        if symmetric is None:
            symmetric = bool(np.array_equal(dense, dense.T))
        m = sp.csr_matrix(dense)
        m.sort_indices()
        return cls(GsoKind.parse(kind), m, symmetric)


def build_gso(g, kind):
    """Build the shift operator of the requested kind.

    ``adjacency``            ``A``
    ``laplacian``            ``D - A``
    ``normalized_adjacency`` ``D^-1/2 A D^-1/2``
    ``normalized_laplacian`` ``I - D^-1/2 A D^-1/2``
    ``random_walk``          ``A D^-1``  (aggregates ``x_u / d_u``; columns sum to 1)
    """
    kind = GsoKind.parse(kind)
    d = degrees(g).astype(float)
    if kind.degree_normalized and g.n_nodes:
        isolated = np.flatnonzero(d == 0)
        if isolated.size:
            raise GsoDomainError(kind, int(isolated[0]))
    a = g.adjacency()
    n = g.n_nodes
    if kind is GsoKind.ADJACENCY:
        m = a
    elif kind is GsoKind.LAPLACIAN:
        m = sp.diags(d) - a
    elif kind is GsoKind.NORMALIZED_ADJACENCY:
        r = sp.diags(1.0 / np.sqrt(d))
        m = r @ a @ r
    elif kind is GsoKind.NORMALIZED_LAPLACIAN:
        r = sp.diags(1.0 / np.sqrt(d))
        m = sp.identity(n) - r @ a @ r
    else:
        m = a @ sp.diags(1.0 / d)
    m = sp.csr_matrix(m, dtype=float)
    m.eliminate_zeros()
    m.sort_indices()
    return GsoMatrix(kind, m, kind.symmetric)


def spmv(s, x):
    """Apply ``S`` to a vector or an ``(N, ...)`` array without densifying ``S``.

    Trailing axes are flattened into columns, so batched signals of shape
    ``(N, B, F)`` cost one sparse product.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[0] != s.n:
        raise ValueError(f"dimension mismatch: operator has {s.n} rows, input has {x.shape[0]}")
    if x.ndim <= 2:
        return s.matrix @ x
    flat = x.reshape(s.n, -1)
    return (s.matrix @ flat).reshape(x.shape)
