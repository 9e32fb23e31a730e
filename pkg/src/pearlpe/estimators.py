"""scikit-learn style wrappers around the encoders.

``BPearl`` and ``RPearl`` are transformers: ``fit`` draws the untrained filter
banks (scaled against the training graphs' operators) and ``transform`` maps a
graph to its ``(N, d)`` encodings. With ``pooling="sum"`` or ``"mean"`` each
graph collapses to one row, which plugs directly into a downstream estimator.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .encoder import GnnConfig, InputDistribution, init_weights, pearl_b, pearl_r
from .graph import GsoKind, build_gso
from .validation import check_graphs, check_positive_int

__all__ = ["BPearl", "RPearl", "SignatureClassifier"]


class _PearlBase(BaseEstimator, TransformerMixin):
    def _fit_config(self, graphs):
        if self.config is not None:
            cfg = self.config
            if not isinstance(cfg, GnnConfig):
                cfg = GnnConfig.from_dict(cfg)
            if cfg.input_width != 1:
                raise ValueError("the first layer must take a single input feature")
            return cfg
        widths = tuple(self.widths)
        orders = tuple(self.orders)
        if widths[0] != 1:
            raise ValueError("widths must start at 1 (one input feature)")
        skeleton = GnnConfig.skeleton(widths, orders, self.nonlinearity,
                                      GsoKind.parse(self.gso), self.skip, self.normalize)
        beta = self.beta if self.beta is not None else 1.0 / skeleton.max_width
        radius = max(build_gso(g, skeleton.gso_kind).inf_norm() for g in graphs)
        return init_weights(skeleton, self.random_state, beta, radius=max(radius, 1e-12))

    def fit(self, X, y=None):
        """Build the encoder network.

        Parameters
        ----------
        X : Graph, adjacency matrix, or sequence of those
            Only the operator norms of the graphs are used (to scale the taps).
        y : ignored
        """
        graphs = check_graphs(X)
        self.config_ = self._fit_config(graphs)
        self.n_features_out_ = self.config_.output_width
        return self

    def _pool(self, values):
        if self.pooling is None:
            return values
        if self.pooling == "sum":
            return values.sum(axis=0)
        if self.pooling == "mean":
            return values.mean(axis=0)
        raise ValueError(f"pooling must be None, 'sum' or 'mean', got {self.pooling!r}")

    def transform(self, X):
        """Encodings of one graph ``(N, d)``, a list of them, or ``(n_graphs, d)``
        when ``pooling`` is set."""
        check_is_fitted(self, "config_")
        single = not isinstance(X, (list, tuple))
        graphs = check_graphs(X)
        out = [self._pool(self._encode(g).values) for g in graphs]
        if self.pooling is not None:
            return np.vstack(out)
        return out[0] if single else out

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "config_")
        return np.array([f"pe_{j}" for j in range(self.n_features_out_)], dtype=object)


class BPearl(_PearlBase):
    """Basis-input encodings: the network summed over all ``N`` indicator inputs.

    Parameters
    ----------
    config : GnnConfig or dict, optional
        Fixed network. When given, ``widths``/``orders``/... are ignored.
    widths : sequence of int
        Feature widths per layer boundary, starting with 1.
    orders : sequence of int
        Filter order ``K`` of each layer.
    nonlinearity : str
    gso : str
        Operator kind, e.g. ``"adjacency"`` or ``"normalized_laplacian"``.
    beta : float, optional
        Per-filter norm bound; defaults to ``1 / max width``.
    skip, normalize : bool
        Additive skip on width-preserving layers; per-sample standardization.
    pooling : {None, "sum", "mean"}
    random_state : int
    n_jobs : int
        Worker threads; results do not depend on it.
    """

    def __init__(self, config=None, widths=(1, 8, 8), orders=(5, 3), nonlinearity="relu",
                 gso="adjacency", beta=None, skip=False, normalize=False, pooling=None,
                 random_state=0, n_jobs=1):
        self.config = config
        self.widths = widths
        self.orders = orders
        self.nonlinearity = nonlinearity
        self.gso = gso
        self.beta = beta
        self.skip = skip
        self.normalize = normalize
        self.pooling = pooling
        self.random_state = random_state
        self.n_jobs = n_jobs

    def _encode(self, g):
        return pearl_b(g, self.config_, self.n_jobs)


class RPearl(_PearlBase):
    """Random-input encodings: the network averaged over ``n_samples`` random signals.

    Takes the parameters of :class:`BPearl` plus ``n_samples`` (``M``) and
    ``distribution`` (``"gaussian"``, ``"rademacher"`` or ``"cubic"``). The
    input stream is seeded by ``random_state``.
    """

    def __init__(self, config=None, widths=(1, 8, 8), orders=(5, 3), nonlinearity="relu",
                 gso="adjacency", beta=None, skip=False, normalize=False, pooling=None,
                 n_samples=1000, distribution="gaussian", random_state=0, n_jobs=1):
        self.config = config
        self.widths = widths
        self.orders = orders
        self.nonlinearity = nonlinearity
        self.gso = gso
        self.beta = beta
        self.skip = skip
        self.normalize = normalize
        self.pooling = pooling
        self.n_samples = n_samples
        self.distribution = distribution
        self.random_state = random_state
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        check_positive_int("n_samples", self.n_samples)
        InputDistribution(self.distribution)
        return super().fit(X, y)

    def _encode(self, g):
        dist = InputDistribution(self.distribution, self.random_state)
        return pearl_r(g, self.config_, dist, self.n_samples, self.n_jobs)


class SignatureClassifier(BaseEstimator, ClassifierMixin):
    """Nearest-prototype classifier on pooled encodings; no weights are learned.

    Each class prototype is the mean pooled encoding of its training graphs.

    Parameters
    ----------
    encoder : transformer, optional
        Must produce one row per graph. Defaults to the fixed CSL encoder
        (``BPearl`` with :func:`~pearlpe.csl.csl_config` and sum pooling).
    """

    def __init__(self, encoder=None):
        self.encoder = encoder

    def _encoder(self):
        if self.encoder is not None:
            return self.encoder
        from .csl import csl_config

        return BPearl(config=csl_config(), pooling="sum")

    def fit(self, X, y):
        graphs = check_graphs(X)
        y = np.asarray(y)
        if len(y) != len(graphs):
            raise ValueError(f"{len(graphs)} graphs but {len(y)} labels")
        self.encoder_ = self._encoder().fit(graphs)
        z = np.atleast_2d(self.encoder_.transform(graphs))
        self.classes_ = np.unique(y)
        self.prototypes_ = np.vstack([z[y == c].mean(axis=0) for c in self.classes_])
        return self

    def decision_function(self, X):
        """Negative distance to every class prototype, shape ``(n_graphs, n_classes)``."""
        check_is_fitted(self, "prototypes_")
        z = np.atleast_2d(self.encoder_.transform(check_graphs(X)))
        return -np.linalg.norm(z[:, None, :] - self.prototypes_[None, :, :], axis=2)

    def predict(self, X):
        return self.classes_[np.argmax(self.decision_function(X), axis=1)]
