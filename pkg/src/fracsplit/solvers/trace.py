"""Per-iteration records, run reports and their CSV/JSON export."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field

import numpy as np

__all__ = ["TRACE_COLUMNS", "IterationTrace", "RunReport", "ThetaBacktrackExhausted"]

TRACE_COLUMNS = ("k", "theta", "gamma", "delta", "psi", "F", "dx", "du", "dz", "jk", "ls_trials", "time_s")


class IterationTrace:
    """Records of completed iterations, optionally with the iterates themselves.

    Besides the exported columns each record keeps ``gamma_eval`` and
    ``delta_eval``, the parameters with which ``theta`` was computed, and a
    ``flag`` string for exceptional events.
    """

    def __init__(self, method="fsps", keep_iterates=False):
        self.method = method
        self.records = []
        self.keep_iterates = keep_iterates
        self.iterates = []  # (x, y, z, u) tuples, index 0 is the start point
        self.gamma0 = None
        self.theta0 = None

    def __len__(self):
        return len(self.records)

    def append(self, **rec):
        rec.setdefault("flag", "")
        self.records.append(rec)

    def store(self, x, y, z, u):
        if self.keep_iterates:
            self.iterates.append(tuple(None if v is None else np.array(v, copy=True) for v in (x, y, z, u)))

    def column(self, name):
        return np.array([r[name] for r in self.records])

    def gammas(self):
        """``gamma_k`` for ``k = 0..len``: the value in force at the start of iteration k."""
        return np.concatenate(([self.gamma0], self.column("gamma")))

    def thetas(self):
        return np.concatenate(([self.theta0], self.column("theta")))

    def freeze_index(self):
        """First index after which ``gamma_k`` never changes again."""
        g = self.gammas()
        k = len(g) - 1
        while k > 0 and g[k - 1] == g[-1]:
            k -= 1
        return k

    def flagged(self):
        return [r for r in self.records if r["flag"]]

    def to_csv(self, path, method_column=False, timings=True):
        """Write the trace; ``timings=False`` leaves ``time_s`` empty so identical runs give identical files."""
        cols = list(TRACE_COLUMNS) + (["method"] if method_column else [])
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(cols)
            for r in self.records:
                row = [_fmt(r.get(c)) if timings or c != "time_s" else "" for c in TRACE_COLUMNS]
                if method_column:
                    row.append(self.method)
                w.writerow(row)


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


@dataclass
class RunReport:
    reason: str
    iterations: int
    objective: float
    wall_time: float
    method: str = "fsps"
    flags: int = 0
    metrics: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)


class ThetaBacktrackExhausted(RuntimeError):
    """No ``gamma`` in the backtracking budget made ``theta`` positive.

    The usual cause is ``inf_S (g(Ax) + h(x)) <= 0``; shifting the numerator
    by a positive constant restores the model assumption.
    """

    def __init__(self, message, trace=None, state=None):
        super().__init__(message + " (theta-positivity backtracking exhausted; consider shift_numerator)")
        self.trace = trace
        self.state = state
