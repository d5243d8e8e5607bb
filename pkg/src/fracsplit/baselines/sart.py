"""Simultaneous algebraic reconstruction with box projection."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

__all__ = ["sart_run", "WEIGHT_FLOOR"]

WEIGHT_FLOOR = 1e-12


def sart_run(projector, measurements, x0, iterations, relaxation=1.0, bounds=(0.0, 1.0), history=False):
    """``x <- Proj_box(x + lam V^{-1} P^T W^{-1} (f - P x))`` for ``iterations`` sweeps.

    ``W`` and ``V`` are the row and column sums of ``P`` (floored at 1e-12).
    With ``history=True`` also returns the residual norms ``||P x^k - f||``
    for ``k = 0..iterations``.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    mat = projector.matrix if hasattr(projector, "matrix") else projector
    if not sp.issparse(mat):
        mat = np.asarray(mat, dtype=float)
    f = np.asarray(measurements, dtype=float)
    x = np.array(x0, dtype=float)
    if mat.shape[0] != f.size or mat.shape[1] != x.size:
        raise ValueError(f"projector shape {mat.shape} does not match data ({f.size}, {x.size})")
    w_inv = 1.0 / np.maximum(np.asarray(mat.sum(axis=1)).ravel(), WEIGHT_FLOOR)
    v_inv = 1.0 / np.maximum(np.asarray(mat.sum(axis=0)).ravel(), WEIGHT_FLOOR)
    matT = mat.T.tocsr() if sp.issparse(mat) else mat.T
    lo, hi = bounds
    res = [float(np.linalg.norm(mat @ x - f))] if history else None
    for _ in range(int(iterations)):
        r = f - mat @ x
        x = np.clip(x + relaxation * v_inv * (matT @ (w_inv * r)), lo, hi)
        if history:
            res.append(float(np.linalg.norm(mat @ x - f)))
    return (x, np.array(res)) if history else x
