"""Dense spectral reference computations (the O(N^3) side).

The eigensolver is a cyclic Jacobi method with round-robin pair ordering: each
round rotates ``N/2`` disjoint index pairs at once, which vectorizes cleanly.
Everything downstream uses eigenspace projectors ``V_mu V_mu^T`` only, so the
sign/basis ambiguity of eigenvectors never leaks into results.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .encoder import GnnConfig, LayerSpec, _standardize, gnn_forward, pearl_b
from .filters import FilterBank, FilterSpec, frequency_response
from .graph import GsoMatrix, build_gso

__all__ = [
    "EigenDecomp",
    "alpha_layer",
    "EigenspaceGrouping",
    "MAX_DENSE_N",
    "eigenspace_projector",
    "eigenvalue_features",
    "group_eigenvalues",
    "spe_equiv_check",
    "spe_reference",
    "symmetric_eig",
    "verify_prop1",
]

MAX_DENSE_N = 512


@dataclass(frozen=True, eq=False)
class EigenDecomp:
    """Ascending eigenvalues and orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0

    @property
    def n(self):
        return len(self.eigenvalues)

    def reconstruct(self):
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.T


def _round_robin(n):
    """Pairings covering every ``(p, q)`` once over ``n - 1`` rounds (``n`` even)."""
    players = list(range(n))
    rounds = []
    for _ in range(n - 1):
        half = n // 2
        p = np.array(players[:half])
        q = np.array(players[half:][::-1])
        rounds.append((np.minimum(p, q), np.maximum(p, q)))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def _as_dense(s):
    if isinstance(s, GsoMatrix):
        if not s.symmetric:
            raise ValueError(f"{s.kind.value} operator is not symmetric")
        return s.toarray()
    return np.array(s, dtype=float)


def _off_norm(a):
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def _rotate_rows(x, p, q, c, sn):
    xp, xq = x[p], x[q]
    x[p] = c[:, None] * xp - sn[:, None] * xq
    x[q] = sn[:, None] * xp + c[:, None] * xq


def symmetric_eig(s, tol=1e-14, max_sweeps=60):
    """Eigendecomposition of a symmetric operator by cyclic Jacobi rotations.

    Accepts a :class:`GsoMatrix` or a dense symmetric array with ``N <= 512``.
    Sweeps stop once the off-diagonal Frobenius mass falls below
    ``tol * ||S||_F``, or when, near that floor, a sweep no longer halves it.
    """
    a = _as_dense(s)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise ValueError("expected a square matrix")
    if n > MAX_DENSE_N:
        raise ValueError(f"dense eigensolver limited to N <= {MAX_DENSE_N}, got {n}")
    if not np.allclose(a, a.T, rtol=0.0, atol=1e-14 * max(1.0, np.abs(a).max(initial=0.0))):
        raise ValueError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    m = n + (n % 2)
    if m != n:
        a = np.pad(a, ((0, 1), (0, 1)))
    vt = np.eye(m)  # rows are eigenvectors
    scale = np.linalg.norm(a)
    rounds = _round_robin(m) if m > 1 else []
    sweeps = 0
    prev = np.inf
    while scale > 0 and sweeps < max_sweeps:
        off = _off_norm(a)
        if off <= tol * scale or (off <= 1e-10 * scale and off > 0.5 * prev):
            break
        prev = off
        sweeps += 1
        for p, q in rounds:
            apq = a[p, q]
            live = np.abs(apq) > 1e-300
            if m != n:
                live &= q != n
            if not live.any():
                continue
            p, q, apq = p[live], q[live], apq[live]
            theta = (a[q, q] - a[p, p]) / (2.0 * apq)
            big = np.abs(theta) > 1e150
            th = np.where(big, 1.0, theta)
            t = np.sign(th) / (np.abs(th) + np.sqrt(th * th + 1.0))
            t = np.where(big, 0.5 / np.where(big, theta, 1.0), t)
            t[theta == 0] = 1.0
            c = 1.0 / np.sqrt(t * t + 1.0)
            sn = t * c
            # J^T A J as two row passes: rows of J^T A, then rows of its transpose
            _rotate_rows(a, p, q, c, sn)
            a = a.T.copy()
            _rotate_rows(a, p, q, c, sn)
            a[p, q] = 0.0
            a[q, p] = 0.0
            _rotate_rows(vt, p, q, c, sn)
    lam = np.diag(a)[:n].copy()
    v = vt[:n, :n].T
    order = np.argsort(lam, kind="stable")
    return EigenDecomp(lam[order], v[:, order].copy(), sweeps)


@dataclass(frozen=True, eq=False)
class EigenspaceGrouping:
    """Distinct eigenvalues (ascending) with the eigenvector columns of each."""

    values: np.ndarray
    groups: tuple
    tol: float

    @property
    def q(self):
        return len(self.groups)

    def multiplicities(self):
        return np.array([len(g) for g in self.groups])


def group_eigenvalues(e, tol=None):
    """Cluster ascending eigenvalues; a gap larger than ``tol`` opens a new group.

    ``tol`` defaults to ``1e-6 * max |lambda|`` (``1e-12`` for the zero operator).
    """
    lam = e.eigenvalues
    if tol is None:
        tol = max(1e-6 * float(np.max(np.abs(lam), initial=0.0)), 1e-12)
    if tol <= 0:
        raise ValueError("tol must be positive")
    groups, current = [], [0]
    for i in range(1, len(lam)):
        if lam[i] - lam[i - 1] > tol:
            groups.append(current)
            current = []
        current.append(i)
    if len(lam):
        groups.append(current)
    values = np.array([lam[g].mean() for g in groups])
    return EigenspaceGrouping(values, tuple(np.array(g) for g in groups), float(tol))


def eigenspace_projector(e, grouping, f):
    """``V_mu V_mu^T`` for group ``f``."""
    cols = e.eigenvectors[:, grouping.groups[f]]
    return cols @ cols.T


def eigenvalue_features(e, grouping):
    """``[(mult(mu) * mu, mult(mu)), ...]`` in ascending ``mu`` order."""
    return [(float(len(g) * mu), int(len(g))) for mu, g in zip(grouping.values, grouping.groups)]


def verify_prop1(cfg, s, x_prev, eig=None):
    """Relative max-abs gap between a layer and its eigenvector-domain rewrite.

    The rewrite forms ``W[n, f] = sum_i sum_k lambda_n^k H_k[i, f] <v_n, X[:, i]>``
    and evaluates ``sigma(V W)`` (followed by the layer's skip/normalize steps),
    which must equal the message-passing output.
    """
    if len(cfg.layers) != 1:
        raise ValueError("verify_prop1 takes a single-layer config")
    if not s.symmetric:
        raise ValueError("eigenvector rewrite is only implemented for symmetric operators")
    layer = cfg.layers[0]
    x = np.asarray(x_prev, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    e = eig or symmetric_eig(s)
    lam, v = e.eigenvalues, e.eigenvectors
    inner = v.T @ x  # <v_n, X[:, i]>
    powers = lam[:, None] ** np.arange(layer.order)[None, :]  # (N, K)
    w = np.einsum("nk,ni,kif->nf", powers, inner, layer.bank.coeffs)
    spectral = layer.nonlinearity(v @ w)
    if layer.skip:
        spectral = spectral + x
    if layer.normalize:
        spectral = _standardize(spectral)
    direct = gnn_forward(cfg, s, x)
    scale = max(float(np.max(np.abs(direct), initial=0.0)), 1e-300)
    return float(np.max(np.abs(spectral - direct), initial=0.0)) / scale


def _alpha_coeffs(alphas):
    return [a.coeffs if isinstance(a, FilterSpec) else tuple(float(c) for c in np.ravel(a))
            for a in alphas]


def spe_reference(e, alphas, rho_cfg, s):
    """``sum_n rho([V diag(alpha_f(L)) V^T e_n]_f)`` with polynomial ``alpha_f``.

    Dense ``O(N^3)`` path; ``rho_cfg`` is run on operator ``s`` and must accept
    ``len(alphas)`` input features.
    """
    coeffs = _alpha_coeffs(alphas)
    if rho_cfg.input_width != len(coeffs):
        raise ValueError(
            f"rho expects {rho_cfg.input_width} input features but {len(coeffs)} alphas were given"
        )
    v, lam = e.eigenvectors, e.eigenvalues
    mats = [(v * frequency_response(c, lam)) @ v.T for c in coeffs]
    x0 = np.stack(mats, axis=-1)  # x0[:, n, f] = Z_f e_n
    out = gnn_forward(rho_cfg, s, x0)
    return out.sum(axis=1)


def alpha_layer(alphas):
    """The filter-bank layer ``sum_k A^k e_n h_k^T`` equivalent to polynomial alphas."""
    coeffs = _alpha_coeffs(alphas)
    k = max(len(c) for c in coeffs)
    bank = np.zeros((k, 1, len(coeffs)))
    for f, c in enumerate(coeffs):
        bank[: len(c), 0, f] = c
    return LayerSpec(FilterBank(bank), "identity")


def spe_equiv_check(g, alphas, phi_cfg, basis_alphas=None):
    """Max-abs gap between the eigenvector SPE path and basis-input encodings.

    The basis-input network is ``alpha_layer(alphas)`` followed by ``phi_cfg``.
    ``basis_alphas`` substitutes different taps on that side (negative control).
    """
    for c in _alpha_coeffs(alphas):
        if not np.all(np.isfinite(c)):
            raise ValueError("alphas must be finite polynomials")
    s = build_gso(g, phi_cfg.gso_kind)
    ref = spe_reference(symmetric_eig(s), alphas, phi_cfg, s)
    first = alpha_layer(basis_alphas if basis_alphas is not None else alphas)
    full = GnnConfig((first,) + phi_cfg.layers, phi_cfg.gso_kind)
    enc = pearl_b(g, full).values
    return float(np.max(np.abs(ref - enc), initial=0.0))

