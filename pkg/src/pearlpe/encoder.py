"""The encoder network and the two PEARL pooling schemes.

``gnn_forward`` runs a stack of graph-perceptron layers
``X <- sigma(sum_k S^k X H_k)`` on a batch of input signals. ``pearl_r`` averages
the network output over ``M`` random node signals; ``pearl_b`` sums it over the
``N`` standard basis vectors.

Batched signals have shape ``(N, B, F)``: node, sample, feature. Samples are
processed in fixed-size chunks and the chunk results are reduced in chunk order,
so outputs do not depend on the number of worker threads.
"""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .filters import FilterBank, FilterSpec, apply_filter, apply_filter_bank
from .graph import Graph, GsoKind, GsoMatrix, build_gso

__all__ = [
    "CUBIC_LAW",
    "GnnConfig",
    "InputDistribution",
    "LayerSpec",
    "Nonlinearity",
    "PeMatrix",
    "SampleStats",
    "gin_layer",
    "gnn_forward",
    "identity_config",
    "init_weights",
    "pearl_b",
    "pearl_r",
    "pearl_r_analytic_mean",
    "pearl_r_stats",
    "scalar_layer",
]

_MAX_CHUNK = 1024
_CHUNK_BUDGET = 1 << 21  # floats per (N, B, F) block


@dataclass(frozen=True)
class Nonlinearity:
    """Pointwise activation: ``relu``, ``tanh``, ``identity`` or ``power`` (``x**p``)."""

    name: str = "relu"
    p: int | None = None

    def __post_init__(self):
        name = self.name.lower()
        if name not in ("relu", "tanh", "identity", "power"):
            raise ValueError(f"unknown nonlinearity {self.name!r}")
        if name == "power":
            if self.p is None or int(self.p) != self.p or self.p < 2:
                raise ValueError("power nonlinearity needs an integer exponent p >= 2")
            object.__setattr__(self, "p", int(self.p))
        elif self.p is not None:
            raise ValueError(f"{name} takes no exponent")
        object.__setattr__(self, "name", name)

    @classmethod
    def power(cls, p):
        return cls("power", p)

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        if isinstance(value, dict):
            if "power" in value:
                return cls.power(value["power"])
            return cls(value["name"], value.get("p"))
        text = str(value).lower()
        if text.startswith("power"):
            return cls.power(int(text.split(":", 1)[1] if ":" in text else text[5:]))
        return cls(text)

    @property
    def lipschitz(self):
        """``C_sigma``; ``None`` for powers, which are not globally Lipschitz."""
        return None if self.name == "power" else 1.0

    def __call__(self, z):
        if self.name == "relu":
            return np.maximum(z, 0.0)
        if self.name == "tanh":
            return np.tanh(z)
        if self.name == "identity":
            return z
        return z ** self.p

    def to_json(self):
        return {"power": self.p} if self.name == "power" else self.name


@dataclass(frozen=True)
class LayerSpec:
    """One graph-perceptron layer.

    ``skip`` adds the layer input to the activated output (width-preserving
    layers only). ``normalize`` then standardizes every feature over the nodes
    of each sample independently.
    """

    bank: FilterBank
    nonlinearity: Nonlinearity = field(default_factory=Nonlinearity)
    skip: bool = False
    normalize: bool = False

    def __post_init__(self):
        if not isinstance(self.bank, FilterBank):
            object.__setattr__(self, "bank", FilterBank(self.bank))
        object.__setattr__(self, "nonlinearity", Nonlinearity.parse(self.nonlinearity))
        if self.skip and self.width_in != self.width_out:
            raise ValueError(
                f"skip connection needs equal widths, got {self.width_in} -> {self.width_out}"
            )

    @property
    def order(self):
        return self.bank.order

    @property
    def width_in(self):
        return self.bank.input_width

    @property
    def width_out(self):
        return self.bank.output_width


def scalar_layer(coeffs, nonlinearity="relu", skip=False, normalize=False):
    return LayerSpec(FilterBank(np.asarray(coeffs, float)[:, None, None]), nonlinearity,
                     skip, normalize)


def gin_layer(weight, eps=0.0, nonlinearity="relu", skip=False, normalize=False):
    """GIN update as a ``K = 2`` layer: ``H_0 = (1 + eps) W``, ``H_1 = W``."""
    w = np.atleast_2d(np.asarray(weight, dtype=float))
    return LayerSpec(FilterBank(np.stack([(1.0 + eps) * w, w])), nonlinearity, skip, normalize)


@dataclass(frozen=True)
class GnnConfig:
    """Layer stack of the encoder network plus the operator it runs on."""

    layers: tuple
    gso_kind: GsoKind = GsoKind.ADJACENCY
    seed: int | None = None

    def __post_init__(self):
        layers = tuple(self.layers)
        if not layers:
            raise ValueError("a config needs at least one layer")
        for i, (a, b) in enumerate(zip(layers, layers[1:])):
            if a.width_out != b.width_in:
                raise ValueError(
                    f"layer {i} outputs {a.width_out} features but layer {i + 1} expects {b.width_in}"
                )
        object.__setattr__(self, "layers", layers)
        object.__setattr__(self, "gso_kind", GsoKind.parse(self.gso_kind))

    @property
    def input_width(self):
        return self.layers[0].width_in

    @property
    def output_width(self):
        return self.layers[-1].width_out

    @property
    def max_width(self):
        return max(max(l.width_in, l.width_out) for l in self.layers)

    def to_dict(self):
        return {
            "gso": self.gso_kind.value,
            "seed": self.seed,
            "layers": [
                {
                    "bank": l.bank.coeffs.tolist(),
                    "nonlinearity": l.nonlinearity.to_json(),
                    "skip": l.skip,
                    "normalize": l.normalize,
                }
                for l in self.layers
            ],
        }

    @classmethod
    def from_dict(cls, data):
        layers = []
        for i, item in enumerate(data["layers"]):
            if "bank" in item:
                bank = FilterBank(item["bank"])
            elif "coeffs" in item:
                bank = FilterBank(np.asarray(item["coeffs"], float))
            else:
                raise ValueError(f"layer {i} needs 'bank' or 'coeffs'")
            layers.append(LayerSpec(bank, Nonlinearity.parse(item.get("nonlinearity", "relu")),
                                    bool(item.get("skip", False)),
                                    bool(item.get("normalize", False))))
        return cls(tuple(layers), GsoKind.parse(data.get("gso", "adjacency")), data.get("seed"))

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def config_hash(self):
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:16]

    @classmethod
    def skeleton(cls, widths, orders, nonlinearity="relu", gso_kind=GsoKind.ADJACENCY,
                 skip=False, normalize=False):
        """Zero-weight config with ``len(orders)`` layers; fill with :func:`init_weights`."""
        if len(widths) != len(orders) + 1:
            raise ValueError("need one more width than orders")
        layers = tuple(
            LayerSpec(FilterBank(np.zeros((k, fi, fo))), nonlinearity,
                      skip and fi == fo, normalize)
            for k, fi, fo in zip(orders, widths[:-1], widths[1:])
        )
        return cls(layers, gso_kind)


def identity_config(width=1, gso_kind=GsoKind.ADJACENCY):
    """Pass-through network: one ``K = 1`` layer with ``H_0 = I`` and no activation."""
    return GnnConfig((LayerSpec(FilterBank.identity(width), "identity"),), gso_kind)


# Two-point law with E[q] = 0, E[q^2] = E[q^3] = 1: the roots of q^2 = q + 1.
_SQRT5 = math.sqrt(5.0)
CUBIC_LAW = {
    "high": (1.0 + _SQRT5) / 2.0,
    "low": (1.0 - _SQRT5) / 2.0,
    "p_high": (_SQRT5 - 1.0) / (2.0 * _SQRT5),
}


@dataclass(frozen=True)
class InputDistribution:
    """I.i.d. node-signal law with a counter-based generator.

    The value at node ``v`` of sample ``m`` depends only on ``(seed, m, v)``:
    sample ``m`` reads the Philox stream starting at counter ``m * blocks``,
    one or two 64-bit words per node.

    ``gaussian``    standard normal (Box-Muller)
    ``rademacher``  uniform on {-1, +1}
    ``cubic``       two-point law with ``E[q] = 0`` and ``E[q^2] = E[q^3] = 1``
    """

    kind: str = "gaussian"
    seed: int = 0

    def __post_init__(self):
        kind = self.kind.lower().replace("-", "_")
        kind = {"gaussianiid": "gaussian", "gaussian_iid": "gaussian", "normal": "gaussian",
                "cubicunit": "cubic", "cubic_unit": "cubic"}.get(kind, kind)
        if kind not in ("gaussian", "rademacher", "cubic"):
            raise ValueError(f"unknown input distribution {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "seed", int(self.seed))

    def _words(self, n_nodes):
        return 2 * n_nodes if self.kind == "gaussian" else n_nodes

    def sample(self, n_nodes, start, count):
        """Samples ``start .. start + count - 1`` as an ``(n_nodes, count)`` array."""
        words = self._words(n_nodes)
        blocks = max(1, -(-words // 4))
        key = np.array([self.seed & 0xFFFFFFFFFFFFFFFF, 0], dtype=np.uint64)
        counter = np.array([start * blocks, 0, 0, 0], dtype=np.uint64)
        bits = np.random.Philox(key=key, counter=counter).random_raw(count * blocks * 4)
        bits = bits.reshape(count, blocks * 4)[:, :words]
        if self.kind == "rademacher":
            q = np.where(bits >> np.uint64(63), 1.0, -1.0)
        else:
            u = (bits >> np.uint64(11)).astype(np.float64) * 2.0**-53
            if self.kind == "cubic":
                q = np.where(u < CUBIC_LAW["p_high"], CUBIC_LAW["high"], CUBIC_LAW["low"])
            else:
                r = np.sqrt(-2.0 * np.log1p(-u[:, :n_nodes]))
                q = r * np.cos(2.0 * np.pi * u[:, n_nodes:])
        return np.ascontiguousarray(q.T)


def _operator(graph_or_gso, kind):
    if isinstance(graph_or_gso, GsoMatrix):
        if graph_or_gso.kind is not kind:
            raise ValueError(f"config runs on {kind.value}, operator is {graph_or_gso.kind.value}")
        return graph_or_gso
    if isinstance(graph_or_gso, Graph):
        return build_gso(graph_or_gso, kind)
    raise TypeError(f"expected Graph or GsoMatrix, got {type(graph_or_gso).__name__}")


def _standardize(y):
    mu = y.mean(axis=0, keepdims=True)
    sd = y.std(axis=0, keepdims=True)
    return (y - mu) / np.where(sd > 1e-12, sd, 1.0)


def forward_layer(layer, s, x):
    """One layer on ``(N, F)`` or ``(N, B, F)`` input."""
    y = layer.nonlinearity(apply_filter_bank(layer.bank, s, x))
    if layer.skip:
        y = y + x
    if layer.normalize:
        y = _standardize(y)
    return y


def gnn_forward(cfg, s, x0):
    """Run every layer of ``cfg`` on ``x0`` (``(N, F_0)`` or batched ``(N, B, F_0)``)."""
    s = _operator(s, cfg.gso_kind)
    x = np.asarray(x0, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.shape[-1] != cfg.input_width:
        raise ValueError(f"input has {x.shape[-1]} features, first layer expects {cfg.input_width}")
    for layer in cfg.layers:
        x = forward_layer(layer, s, x)
    return x


@dataclass
class PeMatrix:
    """Positional encodings ``(N, d_p)`` with provenance."""

    values: np.ndarray
    mode: str
    n_samples: int | None = None
    config_hash: str | None = None
    seed: int | None = None
    distribution: str | None = None

    @property
    def n_nodes(self):
        return self.values.shape[0]

    @property
    def width(self):
        return self.values.shape[1]

    def meta(self):
        return {"mode": self.mode, "M": self.n_samples, "config_hash": self.config_hash,
                "seed": self.seed, "distribution": self.distribution,
                "n_nodes": self.n_nodes, "width": self.width}

    def to_csv(self):
        head = ",".join(["node"] + [f"pe_{j}" for j in range(self.width)])
        rows = [",".join([str(v)] + [repr(float(x)) for x in row])
                for v, row in enumerate(self.values)]
        return "\n".join([head] + rows) + "\n"

    @classmethod
    def from_csv(cls, text, mode="?"):
        lines = [l for l in text.strip().splitlines() if l]
        vals = np.array([[float(t) for t in l.split(",")[1:]] for l in lines[1:]])
        return cls(vals.reshape(len(lines) - 1, -1), mode)


def _chunk_size(n_nodes, width):
    return max(1, min(_MAX_CHUNK, _CHUNK_BUDGET // max(1, n_nodes * width)))


def _chunks(total, size):
    return [(a, min(size, total - a)) for a in range(0, total, size)]


def _map_chunks(fn, chunks, threads):
    if threads and threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, chunks))
    return [fn(c) for c in chunks]


@dataclass
class SampleStats:
    """Per-entry mean and unbiased variance of the encoder output over samples."""

    mean: np.ndarray
    var: np.ndarray
    count: int

    @property
    def stderr(self):
        return np.sqrt(self.var / self.count)


def _merge(a, b):
    # Chan et al. pairwise update of (count, mean, M2)
    n = a[0] + b[0]
    delta = b[1] - a[1]
    mean = a[1] + delta * (b[0] / n)
    m2 = a[2] + b[2] + delta**2 * (a[0] * b[0] / n)
    return n, mean, m2


def _random_partials(s, cfg, dist, M, threads, moments, pooled=False):
    n = s.n
    size = _chunk_size(n, cfg.max_width)

    def run(chunk):
        start, count = chunk
        q = dist.sample(n, start, count)[:, :, None]
        out = gnn_forward(cfg, s, q)
        if pooled:
            out = out.sum(axis=0, keepdims=True)
        if not moments:
            return out.sum(axis=1)
        mean = out.mean(axis=1)
        return count, mean, ((out - mean[:, None, :]) ** 2).sum(axis=1)

    return _map_chunks(run, _chunks(M, size), threads)


def pearl_r(g, cfg, dist, M, threads=1):
    """Random-input encodings: ``P = (1/M) sum_m Phi(G, q_m)``."""
    if M < 1:
        raise ValueError("M must be at least 1")
    if cfg.input_width != 1:
        raise ValueError("random-input encodings need a width-1 first layer")
    s = _operator(g, cfg.gso_kind)
    parts = _random_partials(s, cfg, dist, int(M), threads, moments=False)
    total = np.sum(np.stack(parts), axis=0)
    return PeMatrix(total / M, "R", int(M), cfg.config_hash(), dist.seed, dist.kind)


def pearl_r_stats(g, cfg, dist, M, threads=1, pooled=False):
    """Mean and per-entry variance of ``Phi(G, q)`` over ``M`` samples.

    With ``pooled=True`` the statistics are those of the graph-level sum
    ``1^T Phi(G, q)``, returned with shape ``(1, F)``.
    """
    if M < 2:
        raise ValueError("need at least two samples for a variance")
    if cfg.input_width != 1:
        raise ValueError("random-input encodings need a width-1 first layer")
    s = _operator(g, cfg.gso_kind)
    parts = _random_partials(s, cfg, dist, int(M), threads, moments=True, pooled=pooled)
    acc = parts[0]
    for p in parts[1:]:
        acc = _merge(acc, p)
    n, mean, m2 = acc
    return SampleStats(mean, m2 / (n - 1), n)


def pearl_b(g, cfg, threads=1):
    """Basis-input encodings: ``P = sum_m Phi(G, e_m)``."""
    if cfg.input_width != 1:
        raise ValueError("basis-input encodings need a width-1 first layer")
    s = _operator(g, cfg.gso_kind)
    n = s.n
    size = _chunk_size(n, cfg.max_width)

    def run(chunk):
        start, count = chunk
        x = np.zeros((n, count, 1))
        x[start + np.arange(count), np.arange(count), 0] = 1.0
        return gnn_forward(cfg, s, x).sum(axis=1)

    parts = _map_chunks(run, _chunks(n, size), threads)
    total = np.sum(np.stack(parts), axis=0) if parts else np.zeros((0, cfg.output_width))
    return PeMatrix(total, "B", None, cfg.config_hash())


def pearl_r_analytic_mean(cfg, s):
    """Exact ``E[Phi(G, q)] = (H(S) * H(S)) 1`` for one scalar layer with ``sigma = x^2``.

    Holds for any i.i.d. zero-mean, unit-variance input. Dense; meant for
    ``N <= 256``.
    """
    if len(cfg.layers) != 1:
        raise ValueError("analytic mean needs a single layer")
    layer = cfg.layers[0]
    if (layer.width_in, layer.width_out) != (1, 1):
        raise ValueError("analytic mean needs scalar input and output widths")
    if layer.nonlinearity != Nonlinearity.power(2) or layer.skip or layer.normalize:
        raise ValueError("analytic mean needs a plain power-2 activation")
    s = _operator(s, cfg.gso_kind)
    if s.n > 256:
        raise ValueError("analytic mean is dense; N must be <= 256")
    h = apply_filter(FilterSpec(tuple(layer.bank.coeffs[:, 0, 0]), cfg.gso_kind), s, np.eye(s.n))
    return (h * h).sum(axis=1)[:, None]


def init_weights(cfg, seed, beta_target, radius=None, gso=None):
    """Random banks with every scalar filter scaled to norm bound ``beta_target``.

    Taps are drawn uniformly in ``[-1, 1]`` and each scalar filter is rescaled so
    that ``sum_k |h_k| r^k = beta_target``, where ``r`` is ``radius`` or
    ``gso.inf_norm()`` (default 1). That quantity bounds both the operator norm
    and the absolute row sums of ``H(S)`` for any operator with
    ``||S||_inf <= r``.
    """
    if beta_target <= 0:
        raise ValueError("beta_target must be positive")
    if radius is None:
        radius = gso.inf_norm() if gso is not None else 1.0
    rng = np.random.default_rng(seed)
    layers = []
    for layer in cfg.layers:
        k, fi, fo = layer.bank.coeffs.shape
        h = rng.uniform(-1.0, 1.0, size=(k, fi, fo))
        norm = np.tensordot(float(radius) ** np.arange(k), np.abs(h), axes=1)
        h = h * (beta_target / np.where(norm > 0, norm, 1.0))[None]
        layers.append(replace(layer, bank=FilterBank(h)))
    return GnnConfig(tuple(layers), cfg.gso_kind, seed)
