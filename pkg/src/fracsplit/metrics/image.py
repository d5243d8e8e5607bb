"""Image and vector error measures."""

from __future__ import annotations

import numpy as np

__all__ = ["rmse", "ssim", "rerr", "infeas", "SSIM_WINDOW", "SSIM_C"]

SSIM_WINDOW = 8
SSIM_C = 0.05


def rmse(u, v):
    """``||u - v|| / N`` with ``N`` the number of pixels (not ``sqrt(N)``)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError(f"shape mismatch: {u.shape} vs {v.shape}")
    return float(np.linalg.norm((u - v).ravel()) / u.size)


def _windows(img, w):
    n0, n1 = img.shape[0] // w, img.shape[1] // w
    return img[:n0 * w, :n1 * w].reshape(n0, w, n1, w).swapaxes(1, 2).reshape(n0 * n1, w * w)


def ssim(u, v, window=SSIM_WINDOW, c1=SSIM_C, c2=SSIM_C):
    """Mean local similarity over non-overlapping ``window x window`` tiles.

    Partial tiles at the border are dropped. Variances and the covariance use
    the ``1 / (window^2 - 1)`` normalisation.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape or u.ndim != 2:
        raise ValueError("ssim expects two images of the same 2-D shape")
    if min(u.shape) < window:
        raise ValueError(f"images must be at least {window}x{window}")
    U, V = _windows(u, window), _windows(v, window)
    mu_u, mu_v = U.mean(axis=1), V.mean(axis=1)
    du, dv = U - mu_u[:, None], V - mu_v[:, None]
    m = window * window - 1
    var_u, var_v = (du * du).sum(axis=1) / m, (dv * dv).sum(axis=1) / m
    cov = (du * dv).sum(axis=1) / m
    local = ((2 * mu_u * mu_v + c1) * (2 * cov + c2)) / ((mu_u ** 2 + mu_v ** 2 + c1) * (var_u + var_v + c2))
    return float(local.mean())


def rerr(x, x_true):
    """``||x - x*|| / ||x*||``."""
    x_true = np.asarray(x_true, dtype=float)
    nt = np.linalg.norm(x_true)
    if nt == 0:
        raise ValueError("ground truth must be nonzero")
    return float(np.linalg.norm(np.asarray(x, dtype=float) - x_true) / nt)


def infeas(x):
    """``||max(-x, 0)||_1 + | ||x||_1 - 1 |``, the distance-like measure to the simplex."""
    x = np.asarray(x, dtype=float)
    return float(np.maximum(-x, 0.0).sum() + abs(np.abs(x).sum() - 1.0))
