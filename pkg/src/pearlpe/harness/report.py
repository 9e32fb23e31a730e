"""Structured experiment results with a JSON form and a fixed-width table."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["ExperimentReport"]


def _plain(value):
    """Convert numpy scalars/arrays and tuples into JSON-ready Python values."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


@dataclass
class ExperimentReport:
    """Outcome of one harness experiment.

    Attributes
    ----------
    name : str
    bound : str
        The inequality each trial is checked against, as a formula.
    parameters : dict
    trials : list of dict
        One record per measurement.
    summary : dict
    passed : bool
    notes : list of str
    """

    name: str
    bound: str
    parameters: dict = field(default_factory=dict)
    trials: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    passed: bool = True
    notes: list = field(default_factory=list)

    def to_dict(self):
        return _plain({
            "name": self.name,
            "bound": self.bound,
            "passed": bool(self.passed),
            "parameters": self.parameters,
            "summary": self.summary,
            "notes": self.notes,
            "trials": self.trials,
        })

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    @classmethod
    def merge(cls, name, reports):
        """Combine sub-reports; passes only if every part passes."""
        reports = list(reports)
        return cls(
            name,
            "; ".join(sorted({r.bound for r in reports})),
            {"parts": [r.name for r in reports]},
            [t | {"part": r.name} for r in reports for t in r.trials],
            {r.name: r.summary for r in reports},
            all(r.passed for r in reports),
            [n for r in reports for n in r.notes],
        )

    def table(self, columns=None, max_rows=40):
        """Render the trials as an aligned text table."""
        head = f"{self.name}: {'PASS' if self.passed else 'FAIL'}  [{self.bound}]"
        rows = [_plain(t) for t in self.trials]
        if not rows:
            return head
        if columns is None:
            columns = list(rows[0])
        cells = [[_fmt(r.get(c, "")) for c in columns] for r in rows[:max_rows]]
        widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(columns)]
        lines = [head, "  ".join(c.rjust(w) for c, w in zip(columns, widths))]
        lines += ["  ".join(v.rjust(w) for v, w in zip(row, widths)) for row in cells]
        if len(rows) > max_rows:
            lines.append(f"... {len(rows) - max_rows} more rows")
        return "\n".join(lines)


def _fmt(v):
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, float):
        return f"{v:.4g}"
    return str(v)
