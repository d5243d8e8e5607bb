"""The single-ratio fractional program ``min_{x in S} (g(Ax) + h(x) + shift) / f(Kx)``."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .functions import ConvexFunction, ConvexifiedSmooth, QuadAugmented, SmoothFunction
from .operators import LinearOperator
from .sets import FeasibleSet

__all__ = ["ModelViolation", "FractionalProblem", "objective_F", "convexify", "shift_numerator"]


class ModelViolation(ValueError):
    """The denominator ``f(Kx)`` is not positive at a point where it must be."""


@dataclass(frozen=True, eq=False)
class FractionalProblem:
    S: FeasibleSet
    A: LinearOperator
    K: LinearOperator
    g: ConvexFunction
    f: ConvexFunction
    h: SmoothFunction
    shift: float = 0.0
    s_cvx: float = 0.0
    x_true: np.ndarray | None = None
    base: "FractionalProblem | None" = None
    name: str = "problem"

    def __post_init__(self):
        n = self.S.dim
        if self.A.shape[1] != n or self.K.shape[1] != n:
            raise ValueError(
                f"operator input dims {self.A.shape[1]}, {self.K.shape[1]} do not match set dim {n}")
        if self.x_true is not None and np.size(self.x_true) != n:
            raise ValueError("ground truth has the wrong dimension")

    @property
    def dim(self):
        return self.S.dim

    @property
    def L_h(self):
        return float(self.h.lipschitz)

    @property
    def A_norm(self):
        return self.A.norm

    def numerator(self, x):
        return self.g.value(self.A.apply(x)) + self.h.value(x) + self.shift

    def denominator(self, x):
        return self.f.value(self.K.apply(x))

    def h_value(self, x):
        """Smooth part of the numerator including the constant shift."""
        return self.h.value(x) + self.shift

    @property
    def original(self):
        """The problem before any convexification."""
        return self if self.base is None else self.base.original

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


def objective_F(problem, x):
    """Evaluate ``F(x)``; raises :class:`ModelViolation` when ``f(Kx) <= 0``."""
    den = problem.denominator(x)
    if not den > 0:
        raise ModelViolation(f"f(Kx) = {den!r} is not positive")
    num = problem.numerator(x)
    if num == np.inf:
        return np.inf
    return num / den


def convexify(problem, s):
    """Replace ``g`` by ``g + (s/2)||.||^2`` and ``h`` by ``h - (s/2)||A.||^2``.

    Objective values are unchanged; ``g`` becomes strongly convex and the
    gradient Lipschitz constant grows by ``s ||A||^2``.
    """
    if not s > 0:
        raise ValueError("convexification parameter must be positive")
    return problem.replace(
        g=QuadAugmented(problem.g, s),
        h=ConvexifiedSmooth(problem.h, problem.A, s),
        s_cvx=problem.s_cvx + s,
        base=problem,
    )


def shift_numerator(problem, c):
    """Add the constant ``c > 0`` to the numerator.

    Used to make ``inf_S (g(Ax) + h(x))`` strictly positive. Objective values
    change by ``c / f(Kx)``.
    """
    if not c > 0:
        raise ValueError("shift constant must be positive")
    base = None if problem.base is None else shift_numerator(problem.base, c)
    return problem.replace(shift=problem.shift + c, base=base)
