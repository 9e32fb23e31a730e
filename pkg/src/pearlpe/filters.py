"""Polynomial graph filters ``H(S) = sum_k h_k S^k``.

Filters are applied with a matrix Horner recursion, so a filter of order ``K``
costs ``K - 1`` sparse products and never forms a power of ``S``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import GsoKind, spmv

__all__ = [
    "FilterBank",
    "FilterDesign",
    "FilterSpec",
    "IllPosedError",
    "NormBound",
    "apply_filter",
    "apply_filter_bank",
    "design_interpolating_filter",
    "filter_norm_bound",
    "frequency_response",
    "lipschitz_constants",
    "LIPSCHITZ_GRID",
]

LIPSCHITZ_GRID = 1024


class IllPosedError(ValueError):
    """Interpolation nodes that coincide within tolerance."""


@dataclass(frozen=True)
class FilterSpec:
    """Scalar filter taps ``h_0 .. h_{K-1}`` for a given operator kind."""

    coeffs: tuple
    gso_kind: GsoKind = GsoKind.ADJACENCY

    def __post_init__(self):
        c = tuple(float(v) for v in np.ravel(self.coeffs))
        if not c:
            raise ValueError("a filter needs at least one coefficient")
        if not all(math.isfinite(v) for v in c):
            raise ValueError("filter coefficients must be finite")
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "gso_kind", GsoKind.parse(self.gso_kind))

    @property
    def order(self):
        return len(self.coeffs)


class FilterBank:
    """Coefficient tensor ``H`` of shape ``(K, F_in, F_out)``.

    ``H[k]`` multiplies ``S^k X`` on the right, as in a graph perceptron layer.
    """

    def __init__(self, coeffs):
        h = np.array(coeffs, dtype=float)
        if h.ndim == 1:
            h = h[:, None, None]
        if h.ndim != 3 or h.shape[0] < 1:
            raise ValueError(f"bank must have shape (K, F_in, F_out), got {h.shape}")
        if not np.all(np.isfinite(h)):
            raise ValueError("bank entries must be finite")
        h.setflags(write=False)
        self.coeffs = h

    @classmethod
    def from_filter(cls, f):
        return cls(np.asarray(f.coeffs)[:, None, None])

    @classmethod
    def identity(cls, width):
        return cls(np.eye(width)[None])

    @property
    def order(self):
        return self.coeffs.shape[0]

    @property
    def input_width(self):
        return self.coeffs.shape[1]

    @property
    def output_width(self):
        return self.coeffs.shape[2]

    def scalar_filters(self):
        """Yield ``(i, j, taps)`` for every input/output feature pair."""
        for i in range(self.input_width):
            for j in range(self.output_width):
                yield i, j, self.coeffs[:, i, j]

    def __repr__(self):
        return f"FilterBank(K={self.order}, F_in={self.input_width}, F_out={self.output_width})"


def _check_kind(kind, s):
    if GsoKind.parse(kind) is not s.kind:
        raise ValueError(f"filter designed for {GsoKind.parse(kind).value}, operator is {s.kind.value}")


def apply_filter(f, s, x):
    """``sum_k h_k S^k x`` for a vector or an ``(N, ...)`` array."""
    _check_kind(f.gso_kind, s)
    x = np.asarray(x, dtype=float)
    if x.shape[0] != s.n:
        raise ValueError(f"dimension mismatch: operator has {s.n} rows, input has {x.shape[0]}")
    h = f.coeffs
    y = h[-1] * x
    for c in reversed(h[:-1]):
        y = spmv(s, y)
        if c:
            y = y + c * x
    return y


def apply_filter_bank(b, s, x):
    """``sum_k S^k X H_k`` for ``X`` of shape ``(N, F_in)`` or batched ``(N, B, F_in)``."""
    x = np.asarray(x, dtype=float)
    if x.shape[0] != s.n:
        raise ValueError(f"dimension mismatch: operator has {s.n} rows, input has {x.shape[0]}")
    if x.shape[-1] != b.input_width:
        raise ValueError(f"bank expects {b.input_width} input features, got {x.shape[-1]}")
    h = b.coeffs
    y = x @ h[-1]
    for k in range(b.order - 2, -1, -1):
        y = spmv(s, y) + x @ h[k]
    return y


def frequency_response(f, lam):
    """Evaluate ``h(lambda) = sum_k h_k lambda^k`` by Horner's rule.

    ``f`` may be a :class:`FilterSpec` or a plain coefficient sequence; ``lam``
    may be a scalar or an array.
    """
    coeffs = f.coeffs if isinstance(f, FilterSpec) else tuple(np.ravel(f))
    lam = np.asarray(lam, dtype=float)
    out = np.full(lam.shape, coeffs[-1], dtype=float)
    for c in reversed(coeffs[:-1]):
        out = out * lam + c
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class FilterDesign:
    """Result of :func:`design_interpolating_filter`."""

    filter: FilterSpec
    condition: float
    residual: float
    ill_conditioned: bool


def _lu_solve(a, b):
    """Gaussian elimination with partial pivoting. ``b`` may have several columns."""
    a = np.array(a, dtype=float)
    x = np.array(b, dtype=float)
    n = a.shape[0]
    for col in range(n):
        piv = col + int(np.argmax(np.abs(a[col:, col])))
        if a[piv, col] == 0.0:
            raise IllPosedError("singular Vandermonde system")
        if piv != col:
            a[[col, piv]] = a[[piv, col]]
            x[[col, piv]] = x[[piv, col]]
        factors = a[col + 1:, col] / a[col, col]
        a[col + 1:, col:] -= np.outer(factors, a[col, col:])
        x[col + 1:] -= np.multiply.outer(factors, x[col])
    for row in range(n - 1, -1, -1):
        x[row] = (x[row] - a[row, row + 1:] @ x[row + 1:]) / a[row, row]
    return x


def design_interpolating_filter(mus, gammas, gso_kind=GsoKind.ADJACENCY, tol=1e-9,
                                cond_limit=1e12):
    """Taps ``h`` with ``h(mu_i) = gamma_i`` for ``K = len(mus)`` distinct nodes.

    Solves the ``K x K`` Vandermonde system ``B h = gamma`` with ``B[i, k] = mu_i^k``.
    The 1-norm condition number of ``B`` is computed from its explicit inverse
    (``K`` is small); systems above ``cond_limit`` are flagged, not rejected.

    Raises
    ------
    IllPosedError
        If two nodes are closer than ``tol``.
    """
    mus = np.asarray(mus, dtype=float).ravel()
    gammas = np.asarray(gammas, dtype=float).ravel()
    if mus.size != gammas.size or mus.size == 0:
        raise ValueError("mus and gammas must be non-empty and of equal length")
    srt = np.sort(mus)
    if mus.size > 1 and np.min(np.diff(srt)) <= tol:
        raise IllPosedError(f"interpolation nodes closer than {tol:g}")
    vander = mus[:, None] ** np.arange(mus.size)[None, :]
    h = _lu_solve(vander, gammas)
    inv = _lu_solve(vander, np.eye(mus.size))
    cond = float(np.abs(vander).sum(axis=0).max() * np.abs(inv).sum(axis=0).max())
    spec = FilterSpec(tuple(h), gso_kind)
    residual = float(np.max(np.abs(frequency_response(spec, mus) - gammas)))
    return FilterDesign(spec, cond, residual, cond > cond_limit)


def lipschitz_constants(f, lambda_range, grid=LIPSCHITZ_GRID):
    """Grid estimates of the Lipschitz and integral-Lipschitz constants of ``h``.

    Lipschitz: ``sup |h(l2) - h(l1)| / |l2 - l1|``, estimated as the larger of
    ``max |h'|`` on the grid and the largest adjacent difference quotient.
    Integral Lipschitz: ``sup |lambda h'(lambda)|`` on the grid, the limit of the
    integral-Lipschitz quotient as the two points merge.

    A fixed grid of ``grid`` points (1024 by default) includes both endpoints;
    between grid points the estimate can fall short of the true supremum by
    ``O(h''' / grid)``.
    """
    lo, hi = (float(v) for v in lambda_range)
    if not hi > lo:
        raise ValueError(f"empty interval [{lo}, {hi}]")
    coeffs = f.coeffs if isinstance(f, FilterSpec) else tuple(np.ravel(f))
    lam = np.linspace(lo, hi, grid)
    deriv = [k * c for k, c in enumerate(coeffs)][1:] or [0.0]
    dh = np.abs(frequency_response(deriv, lam))
    vals = frequency_response(coeffs, lam)
    quot = np.abs(np.diff(vals)) / np.diff(lam)
    lip = float(max(dh.max(), quot.max()))
    integral = float(np.max(np.abs(lam) * dh))
    return lip, integral


@dataclass(frozen=True)
class NormBound:
    value: float
    path: str  # "eigen" or "degree"

    def __float__(self):
        return self.value


def filter_norm_bound(b, s, method="auto", eigenvalues=None):
    """Upper bound on ``||H(S)||`` over all scalar filters of a bank.

    ``eigen``  ``max_i |h(lambda_i)|``, exact for symmetric ``S``.
    ``degree`` ``sum_k |h_k| r^k`` with ``r = ||S||_inf`` (max degree for the
    adjacency); this also bounds the absolute row sums of ``H(S)``.
    ``auto``   eigen for symmetric operators with ``N <= 512``, else degree.

    Returns a :class:`NormBound` recording which path produced the value.
    """
    if isinstance(b, FilterSpec):
        b = FilterBank.from_filter(b)
    if method == "auto":
        method = "eigen" if (s.symmetric and s.n <= 512) else "degree"
    if method == "eigen":
        if not s.symmetric:
            raise ValueError("eigenvalue bound requires a symmetric operator")
        if eigenvalues is None:
            from .spectral import symmetric_eig

            eigenvalues = symmetric_eig(s).eigenvalues
        best = max(float(np.max(np.abs(frequency_response(tuple(t), eigenvalues))))
                   for _, _, t in b.scalar_filters())
        return NormBound(best, "eigen")
    if method == "degree":
        r = s.inf_norm()
        powers = r ** np.arange(b.order)
        best = float(np.max(np.tensordot(powers, np.abs(b.coeffs), axes=1)))
        return NormBound(best, "degree")
    raise ValueError(f"unknown method {method!r}")
