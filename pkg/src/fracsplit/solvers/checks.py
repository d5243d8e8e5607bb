"""Runtime invariant checks over recorded traces.

Every check returns a list of human-readable violations; an empty list means
the property holds along the whole trace.
"""

from __future__ import annotations

import numpy as np

from .merit import merit_gamma, merit_pi

__all__ = ["stopping_check", "descent_check", "theta_monotone_check", "gamma_merit_check",
           "fenchel_check", "merit_consistency_check", "window_decrease_check"]

EPS = np.finfo(float).eps


def stopping_check(x_new, x_prev, tol, rule="prev", k=None, max_iter=None):
    """Relative-change test ``||x_new - x_prev|| / scale <= tol``.

    ``rule="prev"`` scales by ``max(eps, ||x_prev||)`` and ``rule="next"`` by
    ``max(||x_new||, eps)``. Also true once ``k > max_iter`` when both are given.
    """
    if k is not None and max_iter is not None and k > max_iter:
        return True
    x_new = np.asarray(x_new, dtype=float)
    x_prev = np.asarray(x_prev, dtype=float)
    ref = x_prev if rule == "prev" else x_new
    if rule not in ("prev", "next"):
        raise ValueError(f"unknown stopping rule {rule!r}")
    return bool(np.linalg.norm(x_new - x_prev) / max(EPS, np.linalg.norm(ref)) <= tol)


def theta_monotone_check(trace, slack=1e-10, start=None):
    """``theta_k > 0`` for all k >= 1 and ``theta_{k+1} <= theta_k`` from the freeze index on."""
    out = []
    th = trace.thetas()
    for k in range(1, len(th)):
        if not th[k] > 0:
            out.append(f"theta_{k} = {th[k]!r} is not positive")
    k0 = trace.freeze_index() if start is None else start
    for k in range(max(k0, 1), len(th) - 1):
        if th[k + 1] > th[k] + slack:
            out.append(f"theta increased at k={k}: {th[k]!r} -> {th[k + 1]!r}")
    return out


def descent_check(trace, problem, nu, beta, slack=1e-8, start=None):
    """Sufficient decrease after ``gamma`` freezes.

    For every iteration ``k >= K0 + 1`` checks
    ``(theta_{k+1} - theta_k) f(Kx^{k+1}) <= -nu ||dx||^2 - c2 ||du||^2 - gamma/2 ||dz||^2``
    with ``c2 = delta (2 - beta) / (2 beta)``, using the recorded ``theta`` and
    step norms and the stored iterates for ``f(Kx^{k+1})``.
    """
    if not trace.iterates:
        raise ValueError("descent_check needs a trace recorded with keep_iterates=True")
    out = []
    th = trace.thetas()
    k0 = trace.freeze_index() if start is None else start
    for k in range(k0 + 1, len(trace)):
        rec = trace.records[k]  # iteration producing index k + 1
        gamma, delta = rec["gamma_eval"], rec["delta_eval"]
        fk1 = problem.denominator(trace.iterates[k + 1][0])
        lhs = (th[k + 1] - th[k]) * fk1
        c2 = delta * (2.0 - beta) / (2.0 * beta)
        rhs = -nu * rec["dx"] ** 2 - c2 * rec["du"] ** 2 - 0.5 * gamma * rec["dz"] ** 2
        if lhs > rhs + slack:
            out.append(f"k={k}: decrease {lhs!r} exceeds bound {rhs!r}")
    return out


def gamma_merit_check(trace, problem, slack=1e-10, start=None):
    """Gamma along the trace is nonincreasing and bounded below by theta after the freeze."""
    if not trace.iterates:
        raise ValueError("gamma_merit_check needs stored iterates")
    out = []
    th = trace.thetas()
    k0 = trace.freeze_index() if start is None else start
    vals = {}
    for k in range(max(k0, 1), len(trace.iterates)):
        rec = trace.records[k - 1]
        x, y, z, u = trace.iterates[k]
        try:
            vals[k] = merit_gamma(problem, x, y, z, u, rec["delta_eval"], rec["gamma_eval"])
        except ValueError as exc:
            out.append(f"k={k}: {exc}")
            continue
        if vals[k] < th[k] - slack * max(1.0, abs(th[k])):
            out.append(f"k={k}: Gamma {vals[k]!r} below theta {th[k]!r}")
    keys = sorted(vals)
    for a, b in zip(keys, keys[1:]):
        if b == a + 1 and vals[b] > vals[a] + slack * max(1.0, abs(vals[a])):
            out.append(f"Gamma increased at k={a}: {vals[a]!r} -> {vals[b]!r}")
    return out


def merit_consistency_check(trace, problem, tol=1e-12):
    """Recorded theta equals Pi evaluated at the stored iterate (adaptive runs)."""
    out = []
    for k, rec in enumerate(trace.records, start=1):
        x, _, z, u = trace.iterates[k]
        val = merit_pi(problem, x, z, u, rec["delta_eval"], rec["gamma_eval"])
        if abs(val - rec["theta"]) > tol * max(1.0, abs(val)):
            out.append(f"k={k}: Pi {val!r} differs from theta {rec['theta']!r}")
    return out


def fenchel_check(trace, problem, tol=1e-8):
    """``w = Ax - gamma z`` is a subgradient of ``g*`` at ``z`` for every dual update.

    Measured through the Fenchel gap ``g(w) + g*(z) - <z, w>``. For the
    line-search variant ``z^{k+1}`` is computed from ``x^k``.
    """
    if not trace.iterates:
        raise ValueError("fenchel_check needs stored iterates")
    lag = 1 if trace.method == "nls" else 0
    out = []
    for k, rec in enumerate(trace.records, start=1):
        x = trace.iterates[k - lag][0]
        z = trace.iterates[k][2]
        w = problem.A.apply(x) - rec["gamma_eval"] * z
        gap = problem.g.value(w) + problem.g.conjugate(z) - float(z @ w)
        if not gap <= tol:
            out.append(f"k={k}: Fenchel gap {gap!r}")
    return out


def window_decrease_check(trace, memory, c, initial_F, slack=0.0):
    """Accepted line-search steps satisfy the nonmonotone decrease against the window maximum."""
    out = []
    hist = [initial_F]
    for k, rec in enumerate(trace.records):
        ref = max(hist[max(0, k - memory):k + 1])
        bound = ref - 0.5 * c * rec["dx"] ** 2
        if "ls-fallback" not in rec["flag"] and rec["F"] > bound + slack:
            out.append(f"k={k + 1}: F {rec['F']!r} above window bound {bound!r}")
        hist.append(rec["F"])
    return out
