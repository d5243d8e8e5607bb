"""Distance of zero to the lifted limiting subdifferential of the ratio.

At ``x`` with numerator value ``a`` (including the shift) and denominator
``b = f(Kx) > 0`` the residual is

    dist(0, b (A* dg(Ax) + grad h(x) + N_S(x)) - a K* df(Kx)).

``dg`` and ``df`` are parametrised by :class:`SubdiffSet` and ``N_S`` is
handled through its closed-form projection, so the distance is the optimal
value of a smooth convex problem over the parameters, solved by accelerated
projected gradient. Convexification leaves this set unchanged, so the
residual is evaluated on the original data.
"""

from __future__ import annotations

import numpy as np

from ..core.functions import SubdiffSet, UnsupportedOperation
from ..core.problem import ModelViolation
from ..core.sets import Singleton

__all__ = ["stat_residual", "stat_residual_info", "STAT_ITERS"]

STAT_ITERS = 500


def _subdiff(fun, w):
    try:
        return fun.subdifferential(w), True
    except UnsupportedOperation:
        return SubdiffSet.point(fun.subgradient(w)), False


def _basis_norm(S, dim):
    if S.basis is None:
        return 1.0
    if S.basis.size == 0:
        return 0.0
    return float(np.linalg.norm(S.basis, 2))


def stat_residual_info(problem, x, iters=STAT_ITERS, use_original=True):
    """Return ``(residual, exact)``; ``exact`` is False when a subdifferential fell back to one subgradient."""
    p = problem.original if use_original else problem
    x = np.asarray(x, dtype=float)
    if isinstance(p.S, Singleton):
        return 0.0, True
    if not p.S.contains(x):
        raise ValueError("x must lie in the feasible set")
    Ax, Kx = p.A.apply(x), p.K.apply(x)
    b = p.f.value(Kx)
    if not b > 0:
        raise ModelViolation(f"f(Kx) = {b!r} is not positive")
    a = p.g.value(Ax) + p.h.value(x) + p.shift
    Sg, exact_g = _subdiff(p.g, Ax)
    Sf, exact_f = _subdiff(p.f, Kx)
    base = b * p.h.grad(x)

    def residual_vec(lam, mu):
        w = base + b * p.A.adjoint(Sg.element(lam)) - a * p.K.adjoint(Sf.element(mu))
        return w + p.S.project_normal_cone(x, -w)

    lip = (b * p.A.norm * _basis_norm(Sg, Ax.size) + abs(a) * p.K.norm * _basis_norm(Sf, Kx.size)) ** 2
    lam, mu = Sg.start.copy(), Sf.start.copy()
    r = residual_vec(lam, mu)
    best = float(np.linalg.norm(r))
    if lip > 0 and (lam.size or mu.size):
        step = 1.0 / lip
        lam_y, mu_y, t = lam.copy(), mu.copy(), 1.0
        for _ in range(int(iters)):
            ry = residual_vec(lam_y, mu_y)
            lam_n = Sg.project(lam_y - step * b * Sg.pullback(p.A.apply(ry)))
            mu_n = Sf.project(mu_y + step * a * Sf.pullback(p.K.apply(ry)))
            t_n = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
            lam_y = lam_n + ((t - 1.0) / t_n) * (lam_n - lam)
            mu_y = mu_n + ((t - 1.0) / t_n) * (mu_n - mu)
            lam, mu, t = lam_n, mu_n, t_n
            best = min(best, float(np.linalg.norm(residual_vec(lam, mu))))
    return best, exact_g and exact_f


def stat_residual(problem, x, iters=STAT_ITERS):
    """Lifted stationarity residual at ``x`` (see the module docstring)."""
    return stat_residual_info(problem, x, iters)[0]
