"""Limited-angle parallel-beam CT: phantom, projector, discrete gradient and the
TV-ratio reconstruction problem.

Images are ``n x n`` arrays flattened row-major, pixel size 1, covering
``[-n/2, n/2]^2`` with row 0 at the top.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from ..core.functions import L1Norm, L2Norm, LeastSquares
from ..core.operators import LinearOperator, MatrixOperator
from ..core.problem import FractionalProblem, convexify
from ..core.sets import Box

__all__ = ["discrete_gradient", "parallel_beam_projector", "shepp_logan", "default_detectors", "angles_for_range",
           "CtInstance", "make_ct_instance", "make_ct_problem", "CT_TAU", "CT_S"]

CT_TAU = 0.1
CT_S = 0.1

# modified Shepp-Logan: intensity, semi-axes (a, b), centre (x0, y0), rotation in degrees
_ELLIPSES = (
    (1.0, 0.69, 0.92, 0.0, 0.0, 0.0),
    (-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0),
    (-0.2, 0.11, 0.31, 0.22, 0.0, -18.0),
    (-0.2, 0.16, 0.41, -0.22, 0.0, 18.0),
    (0.1, 0.21, 0.25, 0.0, 0.35, 0.0),
    (0.1, 0.046, 0.046, 0.0, 0.1, 0.0),
    (0.1, 0.046, 0.046, 0.0, -0.1, 0.0),
    (0.1, 0.046, 0.023, -0.08, -0.605, 0.0),
    (0.1, 0.023, 0.023, 0.0, -0.606, 0.0),
    (0.1, 0.023, 0.046, 0.06, -0.605, 0.0),
)


def shepp_logan(n_img):
    """Ten-ellipse modified Shepp-Logan phantom, clipped to ``[0, 1]``."""
    if n_img < 8:
        raise ValueError("n_img must be at least 8")
    c = (np.arange(n_img) + 0.5) / n_img * 2.0 - 1.0
    X, Y = np.meshgrid(c, -c)  # row 0 is the top of the image
    img = np.zeros((n_img, n_img))
    for val, a, b, x0, y0, phi in _ELLIPSES:
        t = np.deg2rad(phi)
        xr = (X - x0) * np.cos(t) + (Y - y0) * np.sin(t)
        yr = -(X - x0) * np.sin(t) + (Y - y0) * np.cos(t)
        img[(xr / a) ** 2 + (yr / b) ** 2 <= 1.0] += val
    return np.clip(img, 0.0, 1.0)


def discrete_gradient(n_img):
    """Forward differences ``x -> (grad_x x, grad_y x)`` with zero difference on the last column/row."""
    if n_img < 2:
        raise ValueError("n_img must be at least 2")
    n = n_img
    N = n * n

    def fwd(v):
        img = v.reshape(n, n)
        gx = np.zeros((n, n))
        gy = np.zeros((n, n))
        gx[:, :-1] = img[:, 1:] - img[:, :-1]
        gy[:-1, :] = img[1:, :] - img[:-1, :]
        return np.concatenate((gx.ravel(), gy.ravel()))

    def adj(w):
        gx = w[:N].reshape(n, n)
        gy = w[N:].reshape(n, n)
        out = np.zeros((n, n))
        out[:, :-1] -= gx[:, :-1]
        out[:, 1:] += gx[:, :-1]
        out[:-1, :] -= gy[:-1, :]
        out[1:, :] += gy[:-1, :]
        return out.ravel()

    op = LinearOperator((2 * N, N), fwd, adj, name=f"grad{n}")
    op.spec = {"kind": "gradient", "n_img": n}
    return op


def default_detectors(n_img):
    """``ceil(n sqrt 2) + 4`` rounded up to an odd count so one ray passes through the centre."""
    d = int(np.ceil(n_img * np.sqrt(2.0))) + 4
    return d if d % 2 else d + 1


def angles_for_range(range_deg, n_angles=None):
    """Equispaced angles over ``[0, range)``; one per degree by default."""
    n_angles = int(round(range_deg)) if n_angles is None else int(n_angles)
    return list(np.arange(n_angles) * (range_deg / n_angles))


def _ray_row(n, theta, t):
    """Pixel indices and intersection lengths of one ray (Siddon traversal)."""
    half = n / 2.0
    c, s = np.cos(theta), np.sin(theta)
    px, py = -t * s, t * c
    lo, hi = -np.inf, np.inf
    for p, d in ((px, c), (py, s)):
        if abs(d) < 1e-12:
            if abs(p) >= half:
                return None
            continue
        a1, a2 = (-half - p) / d, (half - p) / d
        lo, hi = max(lo, min(a1, a2)), min(hi, max(a1, a2))
    if not hi > lo:
        return None
    grid = np.arange(n + 1) - half
    params = [np.array([lo, hi])]
    for p, d in ((px, c), (py, s)):
        if abs(d) >= 1e-12:
            a = (grid - p) / d
            params.append(a[(a > lo) & (a < hi)])
    a = np.unique(np.concatenate(params))
    seg = np.diff(a)
    keep = seg > 1e-12
    mid = 0.5 * (a[:-1] + a[1:])[keep]
    col = np.clip(np.floor(px + mid * c + half).astype(int), 0, n - 1)
    row = np.clip(np.floor(half - (py + mid * s)).astype(int), 0, n - 1)
    return row * n + col, seg[keep]


@lru_cache(maxsize=16)
def _projector_matrix(n, angles, detectors):
    rows, cols, vals = [], [], []
    offsets = np.arange(detectors) - (detectors - 1) / 2.0
    r = 0
    for ang in angles:
        th = np.deg2rad(ang)
        for t in offsets:
            hit = _ray_row(n, th, t)
            if hit is not None:
                idx, length = hit
                rows.append(np.full(idx.size, r))
                cols.append(idx)
                vals.append(length)
            r += 1
    mat = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                        shape=(len(angles) * detectors, n * n))
    mat.sum_duplicates()
    return mat


def parallel_beam_projector(n_img, angles_deg, detectors=None):
    """Sparse ray-driven parallel-beam projector with exact intersection lengths.

    The ray at angle ``theta`` and detector offset ``t`` is the line
    ``t (-sin theta, cos theta) + s (cos theta, sin theta)``; detectors are
    spaced one pixel apart and centred on the origin.
    """
    if n_img < 8:
        raise ValueError("n_img must be at least 8")
    angles = tuple(float(a) for a in angles_deg)
    if not angles:
        raise ValueError("at least one projection angle is required")
    detectors = default_detectors(n_img) if detectors is None else int(detectors)
    op = MatrixOperator(_projector_matrix(int(n_img), angles, detectors), name=f"radon{n_img}x{len(angles)}")
    op.spec = {"kind": "parallel_beam", "n_img": int(n_img), "angles_deg": list(angles), "detectors": detectors}
    return op


@dataclass
class CtInstance:
    problem: FractionalProblem
    projector: MatrixOperator
    measurements: np.ndarray
    phantom: np.ndarray
    n_img: int
    range_deg: float
    sigma: float
    angles_deg: list
    detectors: int
    tau: float = CT_TAU
    bounds: tuple = (0.0, 1.0)


def make_ct_instance(n_img=64, range_deg=150, sigma=0.0, seed=0, tau=CT_TAU, s=CT_S, detectors=None,
                     n_angles=None):
    """Phantom, limited-angle sinogram and the convexified TV-ratio problem.

    ``F(x) = (tau ||grad x||_1 + 0.5 ||Px - f||^2) / ||grad x||`` over the box
    ``[0, 1]^{n^2}``; Gaussian noise of standard deviation ``sigma`` is added to
    the sinogram.
    """
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    angles = angles_for_range(range_deg, n_angles)
    P = parallel_beam_projector(n_img, angles, detectors)
    phantom = shepp_logan(n_img)
    meas = P.apply(phantom.ravel())
    if sigma > 0:
        meas = meas + sigma * np.random.default_rng(seed).standard_normal(meas.size)
    grad = discrete_gradient(n_img)
    prob = FractionalProblem(
        S=Box(0.0, 1.0, dim=n_img * n_img), A=grad, K=grad, g=L1Norm(tau), f=L2Norm(),
        h=LeastSquares(P, meas), x_true=phantom.ravel(), name=f"ct{n_img}-{range_deg:g}deg")
    if s > 0:
        prob = convexify(prob, s)
    return CtInstance(problem=prob, projector=P, measurements=meas, phantom=phantom, n_img=n_img,
                      range_deg=range_deg, sigma=sigma, angles_deg=angles, detectors=P.spec["detectors"],
                      tau=tau)


def make_ct_problem(n_img=64, range_deg=150, sigma=0.0, seed=0, **kwargs):
    """The :class:`FractionalProblem` of :func:`make_ct_instance`."""
    return make_ct_instance(n_img, range_deg, sigma, seed, **kwargs).problem
