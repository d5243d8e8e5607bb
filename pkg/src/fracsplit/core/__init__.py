import numpy as np

from .functions import (ACTIVE_TOL, ConvexFunction, ConvexifiedSmooth, L1Norm, L2Norm, LeastSquares,
                        LinearFunction, LinfDistance, MaxBlockSquaredNorm, Offset, QuadAugmented,
                        QuadraticForm, SmoothFunction, SubdiffSet, UnsupportedOperation, ZeroFunction,
                        ZeroSmooth)
from .operators import (IdentityOperator, LinearOperator, MatrixOperator, StackedOperator,
                        adjoint_mismatch, op_norm_estimate)
from .problem import FractionalProblem, ModelViolation, convexify, objective_F, shift_numerator
from .sets import MEMBER_TOL, Box, FeasibleSet, Simplex, Singleton, project_l1_ball, project_simplex


def prox(oracle, v, kappa):
    """Proximal map of ``oracle`` with modulus ``kappa``."""
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    return oracle.prox(v, kappa)


def prox_conjugate(oracle, v, kappa):
    """Proximal map of the conjugate of ``oracle`` with modulus ``kappa``."""
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    return oracle.prox_conjugate(v, kappa)


def subgradient_f(oracle, w):
    """Deterministic subgradient selection; raises if ``w`` is outside ``dom f``."""
    if not np.isfinite(oracle.value(w)):
        raise ValueError("point is outside the domain of the function")
    return oracle.subgradient(w)


def project(feasible_set, v):
    v = np.asarray(v, dtype=float)
    if v.shape != (feasible_set.dim,):
        raise ValueError(f"expected a vector of length {feasible_set.dim}, got shape {v.shape}")
    return feasible_set.project(v)

