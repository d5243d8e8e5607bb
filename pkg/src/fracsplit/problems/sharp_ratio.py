"""Random robust ratio instances on the probability simplex.

``min_{x in simplex} max_i (r_i - a_i^T x) / max_j x^T C_j x``
with ``A = (a_1^T; ...; a_m1^T)`` and ``K x = (C_1^{1/2} x, ..., C_m2^{1/2} x)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core.functions import LinfDistance, MaxBlockSquaredNorm, ZeroSmooth
from ..core.operators import MatrixOperator
from ..core.problem import FractionalProblem, convexify
from ..core.sets import Simplex

__all__ = ["SharpRatioInstance", "sharp_ratio_data", "make_sharp_ratio", "SHARP_RATIO_SCENARIOS",
           "SHARP_RATIO_S"]

SHARP_RATIO_SCENARIOS = ((100, 5, 20), (100, 20, 5), (100, 20, 20), (400, 20, 10), (400, 10, 20), (400, 20, 20))
SHARP_RATIO_S = 0.01
EIG_LOW, EIG_HIGH = 1e-3, 1.0 + 1e-3


@dataclass
class SharpRatioInstance:
    n: int
    m1: int
    m2: int
    seed: int
    a: np.ndarray       # (m1, n), entries U[0, 1]
    r: np.ndarray       # (m1,), r_i = ||a_i||_inf + U[0, 1]
    c_half: np.ndarray  # (m2, n, n), symmetric square roots of the C_j
    eigs: np.ndarray    # (m2, n), eigenvalues of the C_j


def sharp_ratio_data(n, m1, m2, seed=0):
    """Draw the raw data of one instance; identical for identical arguments."""
    if min(n, m1, m2) < 1:
        raise ValueError("n, m1 and m2 must be positive")
    rng = np.random.default_rng(seed)
    a = rng.uniform(0.0, 1.0, size=(m1, n))
    r = np.abs(a).max(axis=1) + rng.uniform(0.0, 1.0, size=m1)
    c_half = np.empty((m2, n, n))
    eigs = np.empty((m2, n))
    for j in range(m2):
        Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
        eigs[j] = rng.uniform(EIG_LOW, EIG_HIGH, size=n)
        c_half[j] = (Q * np.sqrt(eigs[j])) @ Q.T
    return SharpRatioInstance(n=n, m1=m1, m2=m2, seed=seed, a=a, r=r, c_half=c_half, eigs=eigs)


def make_sharp_ratio(n, m1, m2, seed=0, s=SHARP_RATIO_S):
    """Build the (convexified when ``s > 0``) fractional problem of a random instance."""
    data = sharp_ratio_data(n, m1, m2, seed)
    A = MatrixOperator(data.a, name="returns")
    K = MatrixOperator(data.c_half.reshape(m2 * n, n), name="cov-roots")
    prob = FractionalProblem(
        S=Simplex(n), A=A, K=K, g=LinfDistance(data.r), f=MaxBlockSquaredNorm([n] * m2), h=ZeroSmooth(),
        name=f"sharp-ratio-{n}-{m1}-{m2}-seed{seed}")
    return convexify(prob, s) if s > 0 else prob
