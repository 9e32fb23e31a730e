"""Permutation-equivariance measurements for encoders."""

from __future__ import annotations

import numpy as np

from ..encoder import InputDistribution, PeMatrix, pearl_r
from ..graph import permute_graph
from .report import ExperimentReport

__all__ = ["equivariance_error", "loglog_slope", "r_pearl_slope_experiment"]


def _values(p):
    return p.values if isinstance(p, PeMatrix) else np.asarray(p, dtype=float)


def equivariance_error(encode, g, perm, relative=False):
    """``max |pi . encode(G) - encode(pi G)|`` where old node ``v`` becomes ``perm[v]``.

    With ``relative=True`` the Frobenius gap divided by ``||encode(G)||_F`` is
    returned instead.
    """
    perm = np.asarray(perm, dtype=np.int64)
    p = _values(encode(g))
    q = _values(encode(permute_graph(g, perm)))
    moved = np.empty_like(p)
    moved[perm] = p
    if relative:
        return float(np.linalg.norm(moved - q) / max(np.linalg.norm(p), 1e-300))
    return float(np.max(np.abs(moved - q), initial=0.0))


def loglog_slope(xs, ys):
    """Least-squares slope of ``log y`` against ``log x``."""
    return float(np.polyfit(np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float)), 1)[0])


def r_pearl_slope_experiment(g, cfg, Ms=(10, 100, 1000, 10000), reps=8, seed=0,
                             distribution="gaussian", target=-0.5, tol=0.15, threads=1):
    """Relative equivariance error of random-input encodings as ``M`` grows.

    For each ``M`` the error is averaged over ``reps`` (permutation, seed) pairs;
    the log-log slope must lie in ``target +/- tol``.
    """
    rng = np.random.default_rng(seed)
    draws = [(rng.permutation(g.n_nodes), int(rng.integers(2**31))) for _ in range(reps)]
    trials = []
    for M in Ms:
        errs = []
        for perm, s in draws:
            dist = InputDistribution(distribution, s)
            errs.append(equivariance_error(lambda h: pearl_r(h, cfg, dist, M, threads), g, perm,
                                           relative=True))
        trials.append({"M": int(M), "mean_error": float(np.mean(errs)),
                       "max_error": float(np.max(errs))})
    slope = loglog_slope(Ms, [t["mean_error"] for t in trials])
    return ExperimentReport(
        "r-pearl-equivariance",
        f"log-log slope in {target} +/- {tol}",
        {"Ms": list(Ms), "reps": reps, "seed": seed, "distribution": distribution,
         "n_nodes": g.n_nodes, "config_hash": cfg.config_hash()},
        trials,
        {"slope": slope},
        abs(slope - target) <= tol,
    )
