"""Seeded verification suites, each returning an :class:`ExperimentReport`.

These back ``pearl verify`` and share defaults with the acceptance tests.
"""

from __future__ import annotations

import math

import numpy as np

from .encoder import GnnConfig, LayerSpec, gin_layer, init_weights
from .filters import FilterBank, FilterSpec, filter_norm_bound
from .generators import erdos_renyi
from .graph import GsoKind, build_gso
from .harness import (ExperimentReport, equivariance_error, moment_input_identity_check,
                      r_pearl_slope_experiment, sample_complexity_experiment,
                      second_moment_identity, stability_experiment)
from .encoder import pearl_b
from .spectral import spe_equiv_check, verify_prop1

__all__ = ["SUITES", "random_config", "run_suite"]

_SYMMETRIC = [k for k in GsoKind if k.symmetric]


def _graph(rng, n_lo, n_hi, p_lo=0.15, p_hi=0.6):
    n = int(rng.integers(n_lo, n_hi + 1))
    return erdos_renyi(n, float(rng.uniform(p_lo, p_hi)), int(rng.integers(2**31)),
                       connected=True)


def random_config(rng, widths, orders, kind=GsoKind.ADJACENCY, graph=None, beta=None,
                  nonlinearity="relu", skip=False, normalize=False):
    """``init_weights`` on a skeleton, scaled against ``graph``'s operator if given."""
    skel = GnnConfig.skeleton(widths, orders, nonlinearity, kind, skip, normalize)
    radius = build_gso(graph, kind).inf_norm() if graph is not None else 1.0
    beta = 1.0 / skel.max_width if beta is None else beta
    return init_weights(skel, int(rng.integers(2**31)), beta, radius=max(radius, 1e-12))


def prop1_suite(seed=0, cases=50, max_n=16, tol=1e-8):
    rng = np.random.default_rng(seed)
    rows = []
    for case in range(cases):
        g = _graph(rng, 2, max_n)
        kind = _SYMMETRIC[int(rng.integers(len(_SYMMETRIC)))]
        s = build_gso(g, kind)
        f_in, f_out = (int(v) for v in rng.integers(1, 5, size=2))
        k = int(rng.integers(1, 6))
        act = ("relu", "tanh", "identity")[int(rng.integers(3))]
        skip = f_in == f_out and bool(rng.integers(2))
        bank = rng.uniform(-1, 1, size=(k, f_in, f_out)) / (max(1.0, s.inf_norm()) ** np.arange(k))[:, None, None]
        cfg = GnnConfig((LayerSpec(FilterBank(bank), act, skip),), kind)
        x = rng.standard_normal((g.n_nodes, f_in))
        res = verify_prop1(cfg, s, x)
        rows.append({"case": case, "n": g.n_nodes, "gso": kind.value, "K": k,
                     "widths": f"{f_in}->{f_out}", "act": act, "skip": skip,
                     "residual": res, "ok": res <= tol})
    return ExperimentReport(
        "prop1", f"relative residual <= {tol:g}", {"seed": seed, "cases": cases, "max_n": max_n},
        rows, {"max_residual": max(r["residual"] for r in rows)}, all(r["ok"] for r in rows))


def spe_suite(seed=0, cases=20, n=12, tol=1e-8):
    rng = np.random.default_rng(seed)
    rows = []
    for case in range(cases):
        g = _graph(rng, min(4, n), n)
        f = int(rng.integers(1, 4))
        alphas = [tuple(rng.uniform(-1, 1, size=int(rng.integers(1, 5))) / 2.0) for _ in range(f)]
        hidden = int(rng.integers(2, 5))
        phi = GnnConfig((gin_layer(rng.uniform(-1, 1, size=(f, hidden)) / f),
                         gin_layer(rng.uniform(-1, 1, size=(hidden, 2)) / hidden)),
                        GsoKind.ADJACENCY)
        diff = spe_equiv_check(g, alphas, phi)
        rows.append({"case": case, "n": g.n_nodes, "alphas": f, "degree": max(len(a) for a in alphas) - 1,
                     "max_abs_diff": diff, "ok": diff <= tol})
    return ExperimentReport(
        "spe", f"max |SPE - basis encoding| <= {tol:g}", {"seed": seed, "cases": cases, "n": n},
        rows, {"max_abs_diff": max(r["max_abs_diff"] for r in rows)}, all(r["ok"] for r in rows))


def b_equivariance_suite(seed=0, cases=100, max_n=64, tol=1e-12):
    rng = np.random.default_rng(seed)
    rows = []
    for case in range(cases):
        g = _graph(rng, 2, max_n, 0.05, 0.3)
        kind = list(GsoKind)[int(rng.integers(len(GsoKind)))]
        cfg = random_config(rng, (1, 4, 3), (int(rng.integers(1, 5)), int(rng.integers(1, 4))),
                            kind, g)
        perm = rng.permutation(g.n_nodes)
        err = equivariance_error(lambda h: pearl_b(h, cfg), g, perm)
        rows.append({"case": case, "n": g.n_nodes, "gso": kind.value, "error": err,
                     "ok": err <= tol})
    return ExperimentReport(
        "b-equivariance", f"max |pi P(G) - P(pi G)| <= {tol:g}",
        {"seed": seed, "cases": cases, "max_n": max_n}, rows,
        {"max_error": max(r["error"] for r in rows)}, all(r["ok"] for r in rows))


def equivariance_suite(seed=0, n=20, threads=1, cases=100):
    rng = np.random.default_rng(seed)
    b = b_equivariance_suite(seed, cases=cases)
    g = _graph(rng, n, n)
    cfg = random_config(rng, (1, 4, 2), (3, 2), GsoKind.ADJACENCY, g)
    r = r_pearl_slope_experiment(g, cfg, seed=seed, threads=threads)
    return ExperimentReport.merge("equivariance", [b, r])


def sample_complexity_suite(seed=0, graphs=5, max_n=64, trials=100, threads=1):
    rng = np.random.default_rng(seed)
    parts = []
    for i in range(graphs):
        g = _graph(rng, 8, max_n, 0.05, 0.3)
        cfg = random_config(rng, (1, 4, 4), (3, 3), GsoKind.ADJACENCY, g)
        rep = sample_complexity_experiment(g, cfg, trials=trials, seed=int(rng.integers(2**31)),
                                           threads=threads)
        rep.name = f"sample-complexity[{i}]"
        parts.append(rep)
    return ExperimentReport.merge("sample-complexity", parts)


def stability_suite(seed=0, n=24, trials=3, threads=1):
    rng = np.random.default_rng(seed)
    parts = []
    for n_nodes, mode in ((n, "R"), (n, "B"), (6, "R")):
        g = _graph(rng, n_nodes, n_nodes)
        cfg = random_config(rng, (1, 4, 4, 4), (3, 3, 3), GsoKind.ADJACENCY, g)
        rep = stability_experiment(g, cfg, trials=trials, seed=int(rng.integers(2**31)), mode=mode,
                                   threads=threads)
        rep.name = f"stability[N={n_nodes},{mode}]"
        parts.append(rep)
    return ExperimentReport.merge("stability", parts)


def normalized_filter(rng, s, k, target=1.0 / math.sqrt(2.0)):
    """Random taps rescaled so the exact ``||H(S)||`` equals ``target``."""
    taps = rng.uniform(-1, 1, size=k)
    nrm = filter_norm_bound(FilterSpec(tuple(taps), s.kind), s, "eigen").value
    if nrm == 0.0:
        taps[0], nrm = 1.0, 1.0
    return FilterSpec(tuple(taps * (target / nrm)), s.kind)


def moments_suite(seed=0, cases=5, M=20_000, n=20, threads=1):
    rng = np.random.default_rng(seed)
    parts = []
    for i in range(cases):
        g = _graph(rng, 4, n)
        s = build_gso(g, GsoKind.ADJACENCY)
        f = normalized_filter(rng, s, int(rng.integers(1, 5)))
        rep = second_moment_identity(f, g, M, int(rng.integers(2**31)), threads=threads)
        rep.name = f"second-moment[{i}]"
        parts.append(rep)
    for p in (2, 3):
        parts.append(moment_input_identity_check(p, n, M, int(rng.integers(2**31))))
    return ExperimentReport.merge("moments", parts)


SUITES = {
    "equivariance": equivariance_suite,
    "prop1": prop1_suite,
    "spe": spe_suite,
    "sample-complexity": sample_complexity_suite,
    "stability": stability_suite,
    "moments": moments_suite,
}


def run_suite(name, seed=0, n=None, threads=1):
    """Run suite ``name`` with its defaults; ``n`` overrides the graph-size knob."""
    if name not in SUITES:
        raise KeyError(name)
    kwargs = {"seed": seed}
    size_arg = {"prop1": "max_n", "spe": "n", "equivariance": "n", "sample-complexity": "max_n",
                "stability": "n", "moments": "n"}[name]
    if n is not None:
        kwargs[size_arg] = n
    if name not in ("prop1", "spe"):
        kwargs["threads"] = threads
    return SUITES[name](**kwargs)
