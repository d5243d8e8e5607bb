"""Dinkelbach's parametric scheme with a majorize-minimize inner solver.

Outer loop: ``c_{k+1} = F(x^{k+1})`` where ``x^{k+1}`` approximately minimises
``phi_c(x) = g(Ax) + h(x) - c f(Kx)`` over ``S``. Inner loop: at ``x^t`` pick
``y in df(Kx^t)`` so that ``g(Ax) + h(x) - c <y, Kx>`` majorises ``phi_c`` up
to a constant, then take one projected step along
``c K*y - grad h(x) - A*z`` with ``z = prox_{g*, 1/gamma}(Ax / gamma)`` (the
``theta = c`` version of the FSPS direction). The step parameter is
backtracked until ``phi_c`` decreases, so ``phi_c`` never increases.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass

import numpy as np

from ..core.problem import objective_F
from ..solvers.checks import stopping_check
from ..solvers.trace import IterationTrace, RunReport

__all__ = ["DinkelbachConfig", "dinkelbach_subproblem", "dinkelbach_run", "subproblem_objective"]


@dataclass
class DinkelbachConfig:
    max_outer: int = 100
    inner_budget: int = 200
    inner_tol: float = 1e-8
    tol: float = 1e-6
    value_tol: float = 1e-9
    stop_rule: str = "next"
    gamma: float = 1e-3
    mu: float = 1e-3
    eta: float = 1.5
    c: float = 1e-4
    ls_trials: int = 60

    def __post_init__(self):
        problems = self.diagnostics()
        if problems:
            raise ValueError("; ".join(problems))

    def diagnostics(self):
        out = []
        for name in ("max_outer", "inner_budget", "ls_trials"):
            if int(getattr(self, name)) < 1:
                out.append(f"{name}={getattr(self, name)} must be >= 1")
        for name in ("gamma", "c"):
            if not getattr(self, name) > 0:
                out.append(f"{name}={getattr(self, name)} must be > 0")
        for name in ("inner_tol", "tol", "value_tol"):
            if not getattr(self, name) >= 0:
                out.append(f"{name}={getattr(self, name)} must be >= 0")
        if not 0 < self.mu < 1:
            out.append(f"mu={self.mu} must lie in the open interval (0, 1)")
        if not self.eta > 1:
            out.append(f"eta={self.eta} must be > 1")
        return out

    def to_dict(self):
        return asdict(self)


def subproblem_objective(problem, c, x):
    """``g(Ax) + h(x) + shift - c f(Kx)``."""
    return problem.numerator(x) - c * problem.denominator(x)


def dinkelbach_subproblem(problem, c, x_init, budget=200, config=None, history=False):
    """Approximate minimiser of ``g(Ax) + h(x) - c f(Kx)`` over ``S`` by majorize-minimize.

    Never increases the subproblem objective. With ``history=True`` also
    returns the objective values ``phi_c(x^t)`` for ``t = 0..steps``.
    """
    if int(budget) < 1:
        raise ValueError("budget must be >= 1")
    if c < 0:
        raise ValueError("c must be nonnegative")
    cfg = DinkelbachConfig() if config is None else config
    p = problem
    x = p.S.project(np.array(x_init, dtype=float))
    val = subproblem_objective(p, c, x)
    vals = [val]
    gam = cfg.gamma
    delta0 = p.L_h + p.A_norm ** 2 / gam
    for _ in range(int(budget)):
        Ax = p.A.apply(x)
        z = p.g.prox_conjugate(Ax / gam, 1.0 / gam)
        y = p.f.subgradient(p.K.apply(x))
        d = c * p.K.adjoint(y) - p.h.grad(x) - p.A.adjoint(z)
        accepted = None
        for s in range(int(cfg.ls_trials)):
            trial = p.S.project(x + d / (cfg.mu * cfg.eta ** s * delta0))
            diff = trial - x
            tval = subproblem_objective(p, c, trial)
            if tval <= val - 0.5 * cfg.c * float(diff @ diff):
                accepted = trial
                break
        if accepted is None:
            break
        done = stopping_check(accepted, x, cfg.inner_tol, "next")
        x, val = accepted, tval
        vals.append(val)
        if done:
            break
    return (x, np.array(vals)) if history else x


def dinkelbach_run(problem, config=None, x0=None):
    """Dinkelbach iterations from ``x0``; returns ``(x, trace, report)``.

    Stops when the relative change of ``x`` drops below ``config.tol`` or
    ``|c_{k+1} - c_k| <= config.value_tol``.
    """
    cfg = DinkelbachConfig() if config is None else config
    p = problem
    x = np.array(x0, dtype=float)
    if not p.S.contains(x):
        raise ValueError("start point is not in the feasible set")
    c = objective_F(p, x)
    trace = IterationTrace("dinkelbach")
    trace.theta0 = c
    reason = "max_iter"
    t0 = time.perf_counter()
    for k in range(int(cfg.max_outer)):
        x_new, vals = dinkelbach_subproblem(p, c, x, cfg.inner_budget, cfg, history=True)
        if not np.all(np.isfinite(vals)):
            raise FloatingPointError("Dinkelbach subproblem diverged")
        c_new = objective_F(p, x_new)
        trace.append(k=k + 1, theta=c_new, gamma=cfg.gamma, delta=np.nan, psi=vals[-1], F=c_new,
                     dx=float(np.linalg.norm(x_new - x)), du=0.0, dz=0.0, jk=0, ls_trials=len(vals) - 1,
                     time_s=time.perf_counter() - t0)
        done = stopping_check(x_new, x, cfg.tol, cfg.stop_rule) or abs(c_new - c) <= cfg.value_tol
        x, c = x_new, c_new
        if done:
            reason = "tolerance"
            break
    report = RunReport(reason=reason, iterations=len(trace), objective=float(c),
                       wall_time=time.perf_counter() - t0, method="dinkelbach")
    return x, trace, report
