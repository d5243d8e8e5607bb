"""Merit functions Psi, Pi and Gamma."""

from __future__ import annotations

import numpy as np

from ..core.problem import ModelViolation
from ..core.sets import MEMBER_TOL

__all__ = ["psi", "psi_terms", "merit_pi", "merit_gamma"]


def psi_terms(problem, Ax, z, x, u, delta, gamma, hx=None):
    """Psi without the indicator term, reusing ``Ax`` and optionally ``h(x) + shift``."""
    gstar = problem.g.conjugate(z)
    if gstar == np.inf:
        return -np.inf
    if hx is None:
        hx = problem.h_value(x)
    d = x - u
    return float(z @ Ax - gstar + hx + 0.5 * delta * (d @ d) - 0.5 * gamma * (z @ z))


def psi(problem, x, z, u, delta, gamma):
    """``<z, Ax> - g*(z) + h(x) + i_S(x) + delta/2 ||x - u||^2 - gamma/2 ||z||^2``.

    Returns ``+inf`` outside ``S`` and ``-inf`` where ``g*(z) = +inf``.
    """
    if delta < 0 or gamma < 0:
        raise ValueError("delta and gamma must be nonnegative")
    x = np.asarray(x, dtype=float)
    if not problem.S.contains(x, MEMBER_TOL):
        return np.inf
    z = np.asarray(z, dtype=float)
    return psi_terms(problem, problem.A.apply(x), z, x, np.asarray(u, dtype=float), delta, gamma)


def merit_pi(problem, x, z, u, delta, gamma):
    """``Psi / f(Kx)``."""
    den = problem.denominator(np.asarray(x, dtype=float))
    if not den > 0:
        raise ModelViolation(f"f(Kx) = {den!r} is not positive")
    return psi(problem, x, z, u, delta, gamma) / den


def merit_gamma(problem, x, y, z, u, delta, gamma):
    """``Psi / (<Kx, y> - f*(y))``, the ratio against the Fenchel lower bound of ``f(Kx)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    fstar = problem.f.conjugate(y)
    den = float(problem.K.apply(x) @ y - fstar)
    if not np.isfinite(fstar) or not den > 0:
        raise ValueError(f"Gamma is undefined: <Kx, y> - f*(y) = {den!r}")
    return psi(problem, x, z, u, delta, gamma) / den
