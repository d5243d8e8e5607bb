"""Full-splitting proximal subgradient iterations with an extrapolated step.

``fsps_step`` / ``fsps_run`` take caller-supplied ``gamma_k`` and ``delta_k``
schedules; ``adaptive_fsps_run`` chooses them itself by backtracking on
``gamma`` until ``theta`` is positive and shrinking ``gamma`` whenever ``z``
leaves the ball of radius ``min(eps / gamma, sqrt(2 eps / gamma))``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..core.problem import ModelViolation
from .checks import stopping_check
from .merit import psi_terms
from .trace import IterationTrace, RunReport, ThetaBacktrackExhausted

__all__ = ["SolverState", "fsps_step", "fsps_run", "adaptive_fsps_run", "delta_rule", "default_dual_start"]

THETA_FLOOR = 1e-8


@dataclass
class SolverState:
    """``(x, y, z, u)`` with the scalars ``theta``, ``gamma``, ``delta`` and counter ``k``."""

    x: np.ndarray
    z: np.ndarray
    u: np.ndarray
    theta: float
    gamma: float
    delta: float
    y: np.ndarray | None = None
    k: int = 0


def delta_rule(problem, nu, gamma):
    """``2 nu + L + 2 ||A||^2 / gamma``."""
    return 2.0 * nu + problem.L_h + 2.0 * problem.A_norm ** 2 / gamma


def default_dual_start(problem, x, gamma):
    """``z = prox_{g*, 1/gamma}(Ax / gamma)``."""
    return problem.g.prox_conjugate(problem.A.apply(x) / gamma, 1.0 / gamma)


def _positive_denominator(problem, Kx):
    den = problem.f.value(Kx)
    if not den > 0:
        raise ModelViolation(f"f(Kx) = {den!r} is not positive")
    return den


def _check_start(problem, x):
    x = np.array(x, dtype=float)
    if x.shape != (problem.dim,):
        raise ValueError(f"start point must have shape ({problem.dim},)")
    if not problem.S.contains(x):
        raise ValueError("start point is not in the feasible set")
    return x


def fsps_step(problem, state, beta, gamma, delta, z_update=None):
    """One update with parameters ``gamma_k = gamma`` and ``delta_k = delta``.

    ``z_update(Ax, gamma)`` replaces the conjugate prox when given; it is used
    for the ``gamma = 0`` variant whose dual step is not a prox.
    """
    p = problem
    x, u, z = state.x, state.u, state.z
    y = p.f.subgradient(p.K.apply(x))
    v = u + (state.theta / delta) * p.K.adjoint(y) - p.h.grad(x) / delta - p.A.adjoint(z) / delta
    x_new = p.S.project(v)
    u_new = (1.0 - beta) * u + beta * x_new
    Ax = p.A.apply(x_new)
    if z_update is not None:
        z_new = np.asarray(z_update(Ax, gamma), dtype=float)
    else:
        z_new = p.g.prox_conjugate(Ax / gamma, 1.0 / gamma)
    den = _positive_denominator(p, p.K.apply(x_new))
    theta = psi_terms(p, Ax, z_new, x_new, u_new, delta, gamma) / den
    return SolverState(x=x_new, z=z_new, u=u_new, theta=theta, gamma=gamma, delta=delta, y=y, k=state.k + 1)


def fsps_run(problem, beta, gamma_schedule, delta_schedule, theta0, x0, z0, u0=None, max_iter=10_000,
             stop=None, z_update=None, keep_iterates=False):
    """Run :func:`fsps_step` with ``gamma_schedule(k)`` and ``delta_schedule(k)``.

    ``stop(state, x_prev)`` ends the run when it returns True. Returns
    ``(state, trace, report)``.
    """
    if not 0 < beta < 2:
        raise ValueError("beta must lie in (0, 2)")
    x0 = _check_start(problem, x0)
    u0 = x0.copy() if u0 is None else np.array(u0, dtype=float)
    state = SolverState(x=x0, z=np.array(z0, dtype=float), u=u0, theta=float(theta0),
                        gamma=gamma_schedule(0), delta=delta_schedule(0))
    trace = IterationTrace("fsps", keep_iterates)
    trace.gamma0, trace.theta0 = state.gamma, state.theta
    trace.store(state.x, None, state.z, state.u)
    reason = "max_iter"
    t0 = time.perf_counter()
    for k in range(max_iter):
        g_k, d_k = gamma_schedule(k), delta_schedule(k)
        new = fsps_step(problem, state, beta, g_k, d_k, z_update)
        Ax = problem.A.apply(new.x)
        den = problem.f.value(problem.K.apply(new.x))
        F = (problem.g.value(Ax) + problem.h_value(new.x)) / den
        trace.append(k=k + 1, theta=new.theta, gamma=g_k, delta=d_k, psi=new.theta * den,
                     F=F, dx=float(np.linalg.norm(new.x - state.x)), du=float(np.linalg.norm(new.u - state.u)),
                     dz=float(np.linalg.norm(new.z - state.z)), jk=0, ls_trials=0,
                     time_s=time.perf_counter() - t0, gamma_eval=g_k, delta_eval=d_k)
        trace.store(new.x, new.y, new.z, new.u)
        x_prev, state = state.x, new
        if stop is not None and stop(state, x_prev):
            reason = "stop"
            break
    report = RunReport(reason=reason, iterations=len(trace), objective=trace.records[-1]["F"] if trace.records else np.nan,
                       wall_time=time.perf_counter() - t0, method="fsps")
    return state, trace, report


def adaptive_fsps_run(problem, config, x0, z0=None, u0=None, keep_iterates=False):
    """Adaptive FSPS: backtracking on ``gamma`` for ``theta > 0`` plus the ``z``-norm guard.

    Returns ``(state, trace, report)``. Raises
    :class:`ThetaBacktrackExhausted` carrying the partial trace when no
    ``gamma`` within ``config.gamma_backtracks`` trials makes ``theta``
    positive.
    """
    p = problem
    cfg = config
    x = _check_start(p, x0)
    u = x.copy() if u0 is None else np.array(u0, dtype=float)
    gamma = float(cfg.gamma0)
    z = default_dual_start(p, x, gamma) if z0 is None else np.array(z0, dtype=float)
    delta = delta_rule(p, cfg.nu, gamma) if cfg.delta0 is None else float(cfg.delta0)
    Kx = p.K.apply(x)
    theta = cfg.theta0
    if theta is None:
        F0 = (p.g.value(p.A.apply(x)) + p.h_value(x)) / _positive_denominator(p, Kx)
        theta = max(F0, THETA_FLOOR)
    state = SolverState(x=x, z=z, u=u, theta=float(theta), gamma=gamma, delta=delta)

    trace = IterationTrace("adaptive", keep_iterates)
    trace.gamma0, trace.theta0 = gamma, state.theta
    trace.store(x, None, z, u)
    beta, q = cfg.beta, cfg.q
    reason = "max_iter"
    t0 = time.perf_counter()
    for k in range(int(cfg.max_iter)):
        y = p.f.subgradient(Kx)
        v = u + (theta / delta) * p.K.adjoint(y) - p.h.grad(x) / delta - p.A.adjoint(z) / delta
        x_new = p.S.project(v)
        u_new = (1.0 - beta) * u + beta * x_new
        Ax = p.A.apply(x_new)
        Kx_new = p.K.apply(x_new)
        den = _positive_denominator(p, Kx_new)
        hx = p.h_value(x_new)
        for j in range(int(cfg.gamma_backtracks)):
            g_j = gamma * q ** j
            z_new = p.g.prox_conjugate(Ax / g_j, 1.0 / g_j)
            ps = psi_terms(p, Ax, z_new, x_new, u_new, delta, g_j, hx=hx)
            theta_new = ps / den
            if theta_new > 0:
                break
        else:
            state = SolverState(x=x, z=z, u=u, theta=theta, gamma=gamma, delta=delta, k=k)
            raise ThetaBacktrackExhausted(
                f"iteration {k}: theta stayed nonpositive for {cfg.gamma_backtracks} values of gamma",
                trace=trace, state=state)
        gamma_new = g_j
        delta_new = delta_rule(p, cfg.nu, gamma_new)
        flag = ""
        if np.linalg.norm(z_new) > min(cfg.eps / gamma_new, np.sqrt(2.0 * cfg.eps / gamma_new)):
            gamma_new *= q
            delta_new = delta_rule(p, cfg.nu, gamma_new)
            flag = "z-guard"
        F = (p.g.value(Ax) + hx) / den
        trace.append(k=k + 1, theta=theta_new, gamma=gamma_new, delta=delta_new, psi=ps, F=F,
                     dx=float(np.linalg.norm(x_new - x)), du=float(np.linalg.norm(u_new - u)),
                     dz=float(np.linalg.norm(z_new - z)), jk=j, ls_trials=0,
                     time_s=time.perf_counter() - t0, gamma_eval=g_j, delta_eval=delta, flag=flag)
        trace.store(x_new, y, z_new, u_new)
        done = stopping_check(x_new, x, cfg.tol, cfg.stop_rule)
        x, u, z, Kx = x_new, u_new, z_new, Kx_new
        theta, gamma, delta = theta_new, gamma_new, delta_new
        if done:
            reason = "tolerance"
            break
    state = SolverState(x=x, z=z, u=u, theta=theta, gamma=gamma, delta=delta, y=y, k=len(trace))
    report = RunReport(reason=reason, iterations=len(trace), objective=float(trace.records[-1]["F"]),
                       wall_time=time.perf_counter() - t0, method="adaptive",
                       flags=sum(1 for r in trace.records if r["flag"]))
    return state, trace, report
