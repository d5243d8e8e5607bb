"""Adaptive FSPS with a nonmonotone line search on the step parameter ``delta``.

Per iteration: backtrack on ``gamma`` at the current point until ``theta`` is
positive, build the direction ``theta K*y - grad h(x) - A*z``, then try
``delta = mu eta^s delta_0`` for ``s = 0, 1, ...`` until the objective drops
below the maximum over the last ``memory + 1`` iterates by ``c/2 ||dx||^2``.
"""

from __future__ import annotations

import time

import numpy as np

from ..core.problem import ModelViolation
from .checks import stopping_check
from .fsps import SolverState, _check_start, _positive_denominator, default_dual_start, delta_rule
from .merit import psi_terms
from .trace import IterationTrace, RunReport, ThetaBacktrackExhausted

__all__ = ["nls_run", "nls_staged_run"]


class _Point:
    """A feasible point with its cached ``Ax``, ``Kx``, ``h(x) + shift``, ``f(Kx)`` and ``F``."""

    __slots__ = ("x", "Ax", "Kx", "hx", "den", "F")

    def __init__(self, problem, x):
        self.x = x
        self.Ax = problem.A.apply(x)
        self.Kx = self.Ax if problem.K is problem.A else problem.K.apply(x)
        self.den = problem.f.value(self.Kx)
        if self.den > 0:
            self.hx = problem.h_value(x)
            self.F = (problem.g.value(self.Ax) + self.hx) / self.den
        else:
            self.hx = None
            self.F = np.inf


def nls_run(problem, config, x0, u0=None, keep_iterates=False):
    """Run the line-search variant from ``(x0, u0)``; returns ``(state, trace, report)``.

    When all ``config.ls_trials`` trial steps fail, the last (smallest) trial
    step is accepted and the record is flagged ``ls-fallback``. Exhausting the
    ``gamma`` budget raises :class:`ThetaBacktrackExhausted`.
    """
    p, cfg = problem, config
    cur = _Point(p, _check_start(p, x0))
    _positive_denominator(p, cur.Kx)
    u = cur.x.copy() if u0 is None else np.array(u0, dtype=float)
    gamma = float(cfg.gamma0)
    delta = delta_rule(p, cfg.nu, gamma) if cfg.delta0 is None else float(cfg.delta0)
    z = default_dual_start(p, cur.x, gamma)
    theta = max(cur.F, 1e-8) if cfg.theta0 is None else float(cfg.theta0)

    trace = IterationTrace("nls", keep_iterates)
    trace.gamma0, trace.theta0 = gamma, theta
    trace.store(cur.x, None, z, u)
    history = [cur.F]
    q, mu, eta, c = cfg.q, cfg.mu, cfg.eta, cfg.c
    memory, trials = int(cfg.memory), int(cfg.ls_trials)
    reason = "max_iter"
    y = None
    t0 = time.perf_counter()
    for k in range(int(cfg.max_iter)):
        for j in range(int(cfg.gamma_backtracks)):
            g_j = gamma * q ** j
            z_new = p.g.prox_conjugate(cur.Ax / g_j, 1.0 / g_j)
            ps = psi_terms(p, cur.Ax, z_new, cur.x, u, delta, g_j, hx=cur.hx)
            theta_new = ps / cur.den
            if theta_new > 0:
                break
        else:
            state = SolverState(x=cur.x, z=z, u=u, theta=theta, gamma=gamma, delta=delta, k=k)
            raise ThetaBacktrackExhausted(
                f"iteration {k}: theta stayed nonpositive for {cfg.gamma_backtracks} values of gamma",
                trace=trace, state=state)
        gamma = g_j
        delta0 = delta_rule(p, cfg.nu, gamma)
        y = p.f.subgradient(cur.Kx)
        d = theta_new * p.K.adjoint(y) - p.h.grad(cur.x) - p.A.adjoint(z_new)
        ref = max(history[-(memory + 1):])
        flag = ""
        for s in range(trials):
            step = mu * eta ** s * delta0
            trial = _Point(p, p.S.project(u + d / step))
            diff = cur.x - trial.x
            if trial.F <= ref - 0.5 * c * float(diff @ diff):
                break
        else:
            flag = "ls-fallback"
            if not trial.den > 0:
                raise ModelViolation("line-search fallback point has f(Kx) <= 0")
        u_new = u - cfg.beta * (u - trial.x)
        gamma_next, delta_next = gamma, delta
        if np.linalg.norm(z_new) > min(cfg.eps / gamma, np.sqrt(2.0 * cfg.eps / gamma)):
            gamma_next = gamma * q
            delta_next = delta_rule(p, cfg.nu, gamma_next)
            flag = (flag + " z-guard").strip()
        trace.append(k=k + 1, theta=theta_new, gamma=gamma_next, delta=delta_next, psi=ps, F=trial.F,
                     dx=float(np.linalg.norm(trial.x - cur.x)), du=float(np.linalg.norm(u_new - u)),
                     dz=float(np.linalg.norm(z_new - z)), jk=j, ls_trials=s + 1,
                     time_s=time.perf_counter() - t0, gamma_eval=gamma, delta_eval=delta,
                     step_delta=step, window_max=ref, flag=flag)
        trace.store(trial.x, y, z_new, u_new)
        history.append(trial.F)
        done = stopping_check(trial.x, cur.x, cfg.tol, cfg.stop_rule)
        cur, u, z = trial, u_new, z_new
        theta, gamma, delta = theta_new, gamma_next, delta_next
        if done:
            reason = "tolerance"
            break
    state = SolverState(x=cur.x, z=z, u=u, theta=theta, gamma=gamma, delta=delta, y=y, k=len(trace))
    report = RunReport(reason=reason, iterations=len(trace), objective=float(cur.F),
                       wall_time=time.perf_counter() - t0, method="nls",
                       flags=sum(1 for r in trace.records if "ls-fallback" in r["flag"]))
    return state, trace, report


def nls_staged_run(problem, config, x0, keep_iterates=False):
    """Run one :func:`nls_run` per entry of ``config.stages``, each warm-started at the previous last iterate.

    Every stage is a fresh run (``gamma``, ``delta`` and ``u`` restart).
    Returns ``(state, traces, report)`` where ``report`` aggregates iterations
    and wall time over the stages.
    """
    x = x0
    traces = []
    total_it, total_t, flags = 0, 0.0, 0
    state = report = None
    for cfg in config.stage_configs():
        state, trace, report = nls_run(problem, cfg, x, keep_iterates=keep_iterates)
        traces.append(trace)
        total_it += report.iterations
        total_t += report.wall_time
        flags += report.flags
        x = state.x
    report = RunReport(reason=report.reason, iterations=total_it, objective=report.objective,
                       wall_time=total_t, method="nls", flags=flags)
    return state, traces, report
