"""Per-node simple-cycle counts: an exact enumerator and a moment-based triangle counter."""

from __future__ import annotations

import numpy as np

from ..encoder import (GnnConfig, InputDistribution, LayerSpec, Nonlinearity, pearl_r_stats)
from ..filters import FilterBank
from ..graph import GsoKind

__all__ = ["CYCLE_GUARD_N", "cycle_count_oracle", "triangle_config", "triangle_estimator"]

CYCLE_GUARD_N = 64


def cycle_count_oracle(g, k):
    """Number of simple ``k``-cycles through each node, ``3 <= k <= 7``.

    Each cycle is enumerated once: paths start at their smallest node ``s``, only
    visit nodes larger than ``s``, and the two orientations are folded by
    requiring ``path[1] < path[-1]``.
    """
    if not 3 <= k <= 7:
        raise ValueError(f"cycle length must be in 3..7, got {k}")
    if k >= 6 and g.n_nodes > CYCLE_GUARD_N:
        raise ValueError(f"k >= 6 enumeration is limited to N <= {CYCLE_GUARD_N}")
    nbrs = [g.neighbors(v).tolist() for v in range(g.n_nodes)]
    counts = np.zeros(g.n_nodes, dtype=np.int64)

    for s in range(g.n_nodes):
        path = [s]
        on_path = {s}

        def extend(v):
            if len(path) == k:
                if s in nbrs[v] and path[1] < path[-1]:
                    counts[path] += 1
                return
            for w in nbrs[v]:
                if w > s and w not in on_path:
                    path.append(w)
                    on_path.add(w)
                    extend(w)
                    path.pop()
                    on_path.discard(w)

        extend(s)
    return counts


def triangle_config():
    """Two-layer network whose expected output is the per-node triangle count.

    Layer 1 emits ``(a + b)^2, a^2, b^2`` with ``a = A q`` and ``b = A^2 q``;
    layer 2 forms ``((a + b)^2 - a^2 - b^2) / 4 = ab / 2``. For Rademacher ``q``,
    ``E[ab] = (A * A^2) 1 = diag(A^3)``, twice the triangle count.
    """
    first = np.zeros((3, 1, 3))
    first[1, 0, :] = (1.0, 1.0, 0.0)
    first[2, 0, :] = (1.0, 0.0, 1.0)
    second = np.array([[[0.25], [-0.25], [-0.25]]])
    return GnnConfig(
        (LayerSpec(FilterBank(first), Nonlinearity.power(2)),
         LayerSpec(FilterBank(second), "identity")),
        GsoKind.ADJACENCY,
    )


def triangle_estimator(g, M=None, seed=0, mode="analytic", threads=1):
    """Per-node triangle counts from the moment construction.

    ``analytic`` evaluates ``(A * A^2) 1 / 2`` densely. ``monte_carlo`` runs the
    random-input encoder with Rademacher inputs and returns ``(mean, stderr)``.
    """
    if mode == "analytic":
        a = g.adjacency()
        return np.asarray((a.multiply(a @ a)).sum(axis=1)).ravel() / 2.0
    if mode in ("monte_carlo", "monte-carlo"):
        if M is None:
            raise ValueError("monte_carlo mode needs M")
        st = pearl_r_stats(g, triangle_config(), InputDistribution("rademacher", seed), M,
                           threads=threads)
        return st.mean[:, 0], st.stderr[:, 0]
    raise ValueError(f"unknown mode {mode!r}")
