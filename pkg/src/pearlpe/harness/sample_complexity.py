"""Empirical check of the ``M = ceil(1 / (delta eps^2))`` sample-size prescription."""

from __future__ import annotations

import math

import numpy as np

from ..encoder import InputDistribution, pearl_r
from .report import ExperimentReport

__all__ = ["prescribed_samples", "sample_complexity_experiment"]


def prescribed_samples(eps, delta):
    """Chebyshev sample size for unit-variance outputs: ``ceil(1 / (delta eps^2))``."""
    if eps <= 0 or not 0 < delta < 1:
        raise ValueError("need eps > 0 and 0 < delta < 1")
    # round before ceil so that 1/(0.1 * 0.1**2) = 1000 does not become 1001
    return math.ceil(round(1.0 / (delta * eps * eps), 9))


def sample_complexity_experiment(g, cfg, dist="gaussian", epsilons=(0.1, 0.2),
                                 deltas=(0.05, 0.1), trials=100, seed=0, M=None,
                                 truth_factor=100, threads=1):
    """Deviation frequency of random-input encodings at the prescribed ``M``.

    The reference mean uses ``truth_factor`` times the largest prescribed ``M``.
    For each ``(eps, delta)`` every trial draws a fresh estimate, and for each
    output entry counts the trials where ``|P - E P| >= eps``. The largest such
    frequency must not exceed ``delta + 2 sqrt(delta (1 - delta) / trials)``.

    Passing ``M`` overrides the sample size. When it is below the prescription
    the cell is reported as "M below prescription" and not judged.
    """
    for layer in cfg.layers:
        c = layer.nonlinearity.lipschitz
        if c is None or c > 1.0:
            raise ValueError(
                f"nonlinearity {layer.nonlinearity.name} is not 1-Lipschitz; "
                "the sample-size prescription does not apply"
            )
    kind = dist.kind if isinstance(dist, InputDistribution) else str(dist)
    rng = np.random.default_rng(seed)
    pairs = [(e, d) for e in epsilons for d in deltas]
    m_max = max(prescribed_samples(e, d) for e, d in pairs)
    truth_seed = int(rng.integers(2**62))
    truth = pearl_r(g, cfg, InputDistribution(kind, truth_seed), truth_factor * m_max,
                    threads).values

    rows = []
    passed = True
    for eps, delta in pairs:
        m_star = prescribed_samples(eps, delta)
        m_run = m_star if M is None else int(M)
        seeds = rng.integers(2**62, size=trials)
        hits = np.zeros(truth.shape)
        for s in seeds:
            est = pearl_r(g, cfg, InputDistribution(kind, int(s)), m_run, threads).values
            hits += np.abs(est - truth) >= eps
        freq = float(hits.max() / trials)
        limit = delta + 2.0 * math.sqrt(delta * (1.0 - delta) / trials)
        if m_run < m_star:
            status = "M below prescription"
        else:
            status = "pass" if freq <= limit else "fail"
            passed &= status == "pass"
        rows.append({"eps": eps, "delta": delta, "M_prescribed": m_star, "M": m_run,
                     "max_freq": freq, "mean_freq": float(hits.mean() / trials),
                     "limit": limit, "status": status})
    return ExperimentReport(
        "sample-complexity",
        "max entry frequency of |P - EP| >= eps <= delta + 2 sqrt(delta(1-delta)/trials)",
        {"epsilons": list(epsilons), "deltas": list(deltas), "trials": trials, "seed": seed,
         "distribution": kind, "truth_M": truth_factor * m_max, "n_nodes": g.n_nodes,
         "config_hash": cfg.config_hash()},
        rows,
        {"worst_freq": max(r["max_freq"] for r in rows)},
        passed,
    )
