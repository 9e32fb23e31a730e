"""Circular skip-link graphs and the training-free classification benchmark.

A CSL graph on 41 nodes joins ``i`` to ``i + 1`` and to ``i + R`` (mod 41). The ten
classes differ only in the skip length ``R``; all are 4-regular, so 1-WL colour
refinement cannot tell them apart.

The fixed encoder is two scalar graph-perceptron layers with taps
``(0, 1, -1/2, 1/3, -1/4)`` on the adjacency and ReLU activations; the second
layer carries an additive skip connection. Summing the basis-input encodings
over all nodes gives one scalar per graph.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .encoder import GnnConfig, InputDistribution, pearl_b, pearl_r_stats, scalar_layer
from .graph import Graph, GsoKind, permute_graph

__all__ = [
    "CSL_N",
    "CSL_SKIPS",
    "CSL_TAPS",
    "CslDataset",
    "CslResult",
    "csl_classify",
    "csl_config",
    "csl_dataset",
    "csl_signature",
    "generate_csl",
]

CSL_N = 41
CSL_SKIPS = (2, 3, 4, 5, 6, 9, 11, 12, 13, 16)
CSL_TAPS = (0.0, 1.0, -1.0 / 2.0, 1.0 / 3.0, -1.0 / 4.0)


def generate_csl(skip, seed=None, n_nodes=CSL_N):
    """CSL graph with skip length ``skip``; ``seed`` relabels the nodes at random."""
    if skip not in CSL_SKIPS:
        raise ValueError(f"skip must be one of {CSL_SKIPS}, got {skip}")
    i = np.arange(n_nodes)
    edges = np.concatenate([np.column_stack([i, (i + 1) % n_nodes]),
                            np.column_stack([i, (i + skip) % n_nodes])])
    g = Graph.from_edges(n_nodes, edges)
    if seed is not None:
        g = permute_graph(g, np.random.default_rng(seed).permutation(n_nodes))
    return g


def csl_config(skip=True):
    """The fixed two-layer encoder; ``skip=False`` drops the second-layer skip."""
    return GnnConfig(
        (scalar_layer(CSL_TAPS, "relu"), scalar_layer(CSL_TAPS, "relu", skip=skip)),
        GsoKind.ADJACENCY,
    )


def csl_signature(g, mode="B", M=10_000, seed=0, cfg=None, threads=1):
    """Graph-level signature ``1^T P``.

    Returns a float for mode ``B``; for mode ``R`` returns ``(mean, stderr)`` of
    the pooled random-input output.
    """
    cfg = csl_config() if cfg is None else cfg
    if mode.upper() == "B":
        return float(pearl_b(g, cfg, threads).values.sum())
    st = pearl_r_stats(g, cfg, InputDistribution("gaussian", seed), M, threads, pooled=True)
    return float(st.mean.sum()), float(np.sqrt(st.var.sum() / st.count))


@dataclass
class CslDataset:
    graphs: list
    labels: np.ndarray
    skips: tuple = CSL_SKIPS

    def __len__(self):
        return len(self.graphs)

    def restrict(self, classes):
        keep = [i for i, y in enumerate(self.labels) if y in set(classes)]
        return CslDataset([self.graphs[i] for i in keep], self.labels[keep], self.skips)


def csl_dataset(copies=15, seed=0):
    """``len(CSL_SKIPS) * copies`` graphs, each a randomly relabeled class member."""
    rng = np.random.default_rng(seed)
    graphs, labels = [], []
    for label, r in enumerate(CSL_SKIPS):
        for _ in range(copies):
            graphs.append(generate_csl(r, int(rng.integers(2**62))))
            labels.append(label)
    return CslDataset(graphs, np.array(labels))


@dataclass
class CslResult:
    """Nearest-prototype classification of CSL signatures.

    ``spread`` is the largest within-class range divided by ``max(1, |mean|)``;
    ``min_gap`` is the smallest distance between distinct class prototypes.
    In mode ``R`` every prototype pair must also be separated by more than
    ``5 sqrt(se_i^2 + se_j^2)`` (``separated``).
    """

    accuracy: float
    confusion: np.ndarray
    prototypes: np.ndarray
    signatures: np.ndarray
    predictions: np.ndarray
    labels: np.ndarray
    spread: float
    min_gap: float
    mode: str = "B"
    prototype_stderr: np.ndarray | None = None
    separated: bool = True
    notes: list = field(default_factory=list)

    def table(self):
        """Aligned per-class table: class, skip, signature."""
        lines = ["class  skip  signature"]
        for c, (r, v) in enumerate(zip(CSL_SKIPS, self.prototypes)):
            extra = "" if self.prototype_stderr is None else f"  +/- {self.prototype_stderr[c]:.1f}"
            lines.append(f"{c:>5}  {r:>4}  {v:>9.1f}{extra}")
        lines.append(f"accuracy {self.accuracy:.4f}")
        return "\n".join(lines)

    def csv(self):
        head = "class,skip,signature" + ("" if self.prototype_stderr is None else ",stderr")
        rows = [head]
        for c, (r, v) in enumerate(zip(CSL_SKIPS, self.prototypes)):
            row = f"{c},{r},{float(v)!r}"
            if self.prototype_stderr is not None:
                row += f",{float(self.prototype_stderr[c])!r}"
            rows.append(row)
        return "\n".join(rows) + "\n"


def csl_classify(dataset=None, mode="B", M=10_000, seed=0, noise=0.0, threads=1, cfg=None):
    """Classify by the nearest class prototype, with no training.

    Prototypes are the signatures of the unpermuted class graphs. ``noise`` adds
    Gaussian jitter of that standard deviation to the dataset signatures
    (a negative control).
    """
    dataset = csl_dataset(seed=seed) if dataset is None else dataset
    mode = mode.upper()
    rng = np.random.default_rng(seed)
    n_cls = len(CSL_SKIPS)

    def sig(g):
        out = csl_signature(g, mode, M, int(rng.integers(2**62)), cfg, threads)
        return (out, 0.0) if mode == "B" else out

    proto, proto_se = np.array([sig(generate_csl(r)) for r in CSL_SKIPS]).T
    sigs = np.array([sig(g)[0] for g in dataset.graphs])
    if noise > 0:
        sigs = sigs + rng.normal(0.0, noise, size=sigs.shape)
    pred = np.argmin(np.abs(sigs[:, None] - proto[None, :]), axis=1)
    labels = np.asarray(dataset.labels)
    confusion = np.zeros((n_cls, n_cls), dtype=np.int64)
    np.add.at(confusion, (labels, pred), 1)

    spread = 0.0
    for c in np.unique(labels):
        v = sigs[labels == c]
        spread = max(spread, float((v.max() - v.min()) / max(1.0, abs(v.mean()))))
    diffs = np.abs(proto[:, None] - proto[None, :])[np.triu_indices(n_cls, 1)]
    min_gap = float(diffs.min())
    separated = True
    if mode == "R":
        se_pair = np.sqrt(proto_se[:, None] ** 2 + proto_se[None, :] ** 2)[np.triu_indices(n_cls, 1)]
        separated = bool(np.all(diffs > 5.0 * se_pair))
    return CslResult(
        float(np.mean(pred == labels)), confusion, proto, sigs, pred, labels, spread,
        min_gap, mode, proto_se if mode == "R" else None, separated,
    )
