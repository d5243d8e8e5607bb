"""Small instances with known answers: sparse recovery on the unit square, a
cycling instance for the ``gamma = 0`` variant, and a one-dimensional ratio.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core.functions import L1Norm, L2Norm, LeastSquares, LinearFunction, Offset, QuadraticForm, ZeroFunction
from ..core.operators import IdentityOperator, MatrixOperator
from ..core.problem import FractionalProblem
from ..core.sets import Box

__all__ = ["ToySetup", "dct2", "make_toy_recovery", "make_divergence_instance", "make_quadratic_over_abs",
           "TOY_BETAS"]

TOY_BETAS = (0.2, 0.6, 1.0, 1.4, 1.8)


def dct2():
    """Orthonormal 2x2 discrete cosine transform ``[[1, 1], [1, -1]] / sqrt(2)``."""
    return np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)


@dataclass
class ToySetup:
    """A problem bundled with its prescribed start point and parameter schedules."""

    problem: FractionalProblem
    x0: np.ndarray
    z0: np.ndarray
    u0: np.ndarray
    theta0: float
    q: float = 0.9999
    delta_offset: float = 5.0

    def gamma_schedule(self, k):
        return self.q ** k

    def delta_schedule(self, k):
        return self.delta_offset + self.problem.L_h + 2.0 / self.gamma_schedule(k)


def make_toy_recovery(tau=1e-3):
    """Recover ``x* = (1, 0)`` from ``b = B x*`` on ``[0, 1]^2`` with ``B`` the 2x2 DCT.

    ``F(x) = (tau ||x||_1 + 0.5 ||Bx - b||^2) / ||x||`` with start
    ``x0 = u0 = (0.2, 1)``, ``z0 = (1e-3, 1e-3)``, ``theta0 = 0.8053`` and
    schedules ``gamma_k = 0.9999^k``, ``delta_k = 5 + L + 2 / gamma_k``.
    """
    B = dct2()
    x_true = np.array([1.0, 0.0])
    ident = IdentityOperator(2)
    prob = FractionalProblem(
        S=Box(0.0, 1.0, dim=2), A=ident, K=ident, g=L1Norm(tau), f=L2Norm(),
        h=LeastSquares(MatrixOperator(B, name="dct2", norm=1.0), B @ x_true),
        x_true=x_true, name="toy-recovery")
    start = np.array([0.2, 1.0])
    return ToySetup(problem=prob, x0=start, z0=np.array([1e-3, 1e-3]), u0=start.copy(), theta0=0.8053)


def make_divergence_instance():
    """``(||x||_1 + 0.5 ||x||^2) / (x_1 + x_2 + 0.5)`` on ``[0, 1]^2``.

    With ``gamma = 0``, ``delta = 1``, ``beta = 1`` and the minimum-norm dual
    choice, iterations started at ``(0, 1)`` alternate between ``(1, 0)`` and
    ``(0, 1)`` forever.
    """
    ident = IdentityOperator(2)
    prob = FractionalProblem(
        S=Box(0.0, 1.0, dim=2), A=ident, K=ident, g=L1Norm(1.0), f=LinearFunction(np.ones(2), 0.5),
        h=QuadraticForm(0.5), name="divergence")
    start = np.array([0.0, 1.0])
    return ToySetup(problem=prob, x0=start, z0=start.copy(), u0=start.copy(), theta0=1.0, q=1.0,
                    delta_offset=1.0)


def make_quadratic_over_abs():
    """``(x^2 + 1) / (|x| + 1)`` on ``[-1, 1]``; ``x = 0`` is a lifted stationary point."""
    ident = IdentityOperator(1)
    return FractionalProblem(
        S=Box(-1.0, 1.0, dim=1), A=ident, K=ident, g=ZeroFunction(), f=Offset(L1Norm(1.0), 1.0),
        h=QuadraticForm(1.0, 1.0), name="quadratic-over-abs")
