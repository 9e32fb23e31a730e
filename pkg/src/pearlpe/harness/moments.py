"""Monte Carlo checks of the input-moment identities behind random-input encodings."""

from __future__ import annotations

import math

import numpy as np

from ..encoder import CUBIC_LAW, GnnConfig, InputDistribution, pearl_r_analytic_mean, pearl_r_stats, scalar_layer
from ..filters import FilterSpec
from ..graph import build_gso
from .report import ExperimentReport

__all__ = ["moment_input_identity_check", "second_moment_identity"]


def second_moment_identity(f, g, M, seed=0, band=None, threads=1):
    """Compare the sample mean of ``(H(S) q)^2`` with ``(H * H) 1``.

    Inputs are Rademacher. Every entry must lie within ``band`` of the exact
    value; ``band`` defaults to ``4 / sqrt(M)``.
    """
    if not isinstance(f, FilterSpec):
        f = FilterSpec(tuple(np.ravel(f)))
    cfg = GnnConfig((scalar_layer(f.coeffs, {"power": 2}),), f.gso_kind)
    s = build_gso(g, f.gso_kind)
    exact = pearl_r_analytic_mean(cfg, s)[:, 0]
    st = pearl_r_stats(s, cfg, InputDistribution("rademacher", seed), M, threads)
    est, se = st.mean[:, 0], st.stderr[:, 0]
    band = 4.0 / math.sqrt(M) if band is None else float(band)
    err = np.abs(est - exact)
    rows = [{"node": v, "exact": exact[v], "estimate": est[v], "abs_error": err[v],
             "stderr": se[v]} for v in range(len(exact))]
    return ExperimentReport(
        "second-moment",
        f"|mean (H q)^2 - (H*H)1| <= {band:.3g} per node",
        {"coeffs": list(f.coeffs), "gso": f.gso_kind.value, "M": M, "seed": seed,
         "n_nodes": g.n_nodes},
        rows,
        {"max_abs_error": float(err.max(initial=0.0)), "band": band,
         # constant products (e.g. K = 1) have zero stderr up to rounding
         "max_error_in_se": float(np.max(err / np.where(se > 1e-9, se, np.inf), initial=0.0))},
        bool(np.all(err <= band)),
    )


def moment_input_identity_check(p, g, M, seed=0, n_offdiag=64, sd_multiple=4.0):
    """Empirical ``p``-th input moments against the basis-product pattern.

    ``E[q_i q_j] = [i = j]`` (Rademacher) and ``E[q_i q_j q_k] = [i = j = k]``
    (cubic two-point law). Each checked entry must lie within
    ``sd_multiple * sd / sqrt(M)`` of its target, with ``sd`` the sample
    standard deviation of the product (zero when the product is constant, as
    ``q_i^2`` is for Rademacher inputs, which then must match exactly).
    ``n_offdiag`` random index tuples with at least two distinct indices
    are checked besides the full diagonal. ``g`` is a graph or a node count.
    """
    n_nodes = int(getattr(g, "n_nodes", g))
    if p not in (2, 3):
        raise ValueError("p must be 2 or 3")
    if n_nodes < 2:
        raise ValueError("need at least two nodes for off-diagonal entries")
    kind = "rademacher" if p == 2 else "cubic"
    q = InputDistribution(kind, seed).sample(n_nodes, 0, M)
    rng = np.random.default_rng(seed)
    rows = []

    def check(idx, target, label):
        prod = np.prod(q[list(idx)], axis=0)
        mean = float(prod.mean())
        sd = float(prod.std(ddof=1)) if M > 1 else 0.0
        band = sd_multiple * sd / math.sqrt(M)
        rows.append({"entry": label, "index": list(idx), "target": target, "mean": mean,
                     "band": band, "ok": abs(mean - target) <= band})

    for i in range(n_nodes):
        check((i,) * p, 1.0, "diagonal")
    for _ in range(n_offdiag):
        idx = tuple(int(v) for v in rng.integers(n_nodes, size=p))
        while len(set(idx)) == 1:
            idx = tuple(int(v) for v in rng.integers(n_nodes, size=p))
        check(idx, 0.0, "off-diagonal")
    notes = []
    if p == 3:
        notes.append(
            "cubic law: values {high:.6f} (prob {p_high:.6f}) and {low:.6f}".format(**CUBIC_LAW)
        )
    return ExperimentReport(
        f"input-moment-p{p}",
        f"|mean - target| <= {sd_multiple:g} sd / sqrt(M)",
        {"p": p, "distribution": kind, "n_nodes": n_nodes, "M": M, "seed": seed,
         "n_offdiag": n_offdiag},
        rows,
        {"checked": len(rows), "failures": sum(not r["ok"] for r in rows)},
        all(r["ok"] for r in rows),
        notes,
    )
