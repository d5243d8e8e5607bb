"""Compact convex feasible sets: Euclidean projections, membership, normal cones."""

from __future__ import annotations

import numpy as np

__all__ = ["FeasibleSet", "Box", "Simplex", "Singleton", "project_simplex", "project_l1_ball", "MEMBER_TOL"]

MEMBER_TOL = 1e-9


def project_simplex(v, radius=1.0):
    """Project ``v`` onto ``{x >= 0, sum(x) = radius}`` by sort-and-threshold."""
    v = np.asarray(v, dtype=float)
    if np.all(v >= 0) and abs(v.sum() - radius) <= 8 * np.finfo(float).eps * max(v.size, radius):
        # already feasible up to rounding; keeps the projection idempotent
        return v.copy()
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - radius
    ind = np.arange(1, v.size + 1)
    rho = np.count_nonzero(u - css / ind > 0)
    tau = css[rho - 1] / rho
    return np.maximum(v - tau, 0.0)


def project_l1_ball(v, radius=1.0):
    """Project ``v`` onto the l1 ball of the given radius."""
    v = np.asarray(v, dtype=float)
    if np.abs(v).sum() <= radius:
        return v.copy()
    return np.sign(v) * project_simplex(np.abs(v), radius)


class FeasibleSet:
    """Base class. Subclasses provide ``project`` and ``contains``."""

    kind = "generic"

    def __init__(self, dim):
        self.dim = int(dim)

    def project(self, v):
        raise NotImplementedError

    def contains(self, x, tol=MEMBER_TOL):
        x = np.asarray(x, dtype=float)
        return x.shape == (self.dim,) and np.linalg.norm(x - self.project(x)) <= tol

    def project_normal_cone(self, x, v):
        """Project ``v`` onto the normal cone of the set at ``x``."""
        raise NotImplementedError(f"normal cone of {self.kind} set is not available")

    def sample(self, rng, size=1):
        raise NotImplementedError

    def to_dict(self):
        raise NotImplementedError


class Box(FeasibleSet):
    """Componentwise bounds ``lower <= x <= upper``."""

    kind = "box"

    def __init__(self, lower, upper, dim=None):
        if dim is None:
            dim = np.size(upper) if np.ndim(upper) else np.size(lower)
        super().__init__(dim)
        self.lower = np.broadcast_to(np.asarray(lower, dtype=float), (self.dim,)).copy()
        self.upper = np.broadcast_to(np.asarray(upper, dtype=float), (self.dim,)).copy()
        if np.any(self.lower > self.upper):
            raise ValueError("box lower bound exceeds upper bound")

    def project(self, v):
        return np.clip(v, self.lower, self.upper)

    def contains(self, x, tol=MEMBER_TOL):
        x = np.asarray(x, dtype=float)
        return x.shape == (self.dim,) and bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))

    def project_normal_cone(self, x, v, tol=MEMBER_TOL):
        at_lo = np.abs(x - self.lower) <= tol
        at_hi = np.abs(x - self.upper) <= tol
        out = np.zeros_like(v)
        both = at_lo & at_hi
        out[both] = v[both]
        only_lo = at_lo & ~at_hi
        only_hi = at_hi & ~at_lo
        out[only_lo] = np.minimum(v[only_lo], 0.0)
        out[only_hi] = np.maximum(v[only_hi], 0.0)
        return out

    def sample(self, rng, size=1):
        return self.lower + (self.upper - self.lower) * rng.random((size, self.dim))

    def to_dict(self):
        lo, hi = self.lower, self.upper
        if np.all(lo == lo[0]) and np.all(hi == hi[0]):
            return {"kind": "box", "dim": self.dim, "lower": float(lo[0]), "upper": float(hi[0])}
        return {"kind": "box", "dim": self.dim, "lower": lo.tolist(), "upper": hi.tolist()}


class Simplex(FeasibleSet):
    """The probability simplex ``{x >= 0, e^T x = 1}``."""

    kind = "simplex"

    def project(self, v):
        return project_simplex(v)

    def contains(self, x, tol=MEMBER_TOL):
        x = np.asarray(x, dtype=float)
        return x.shape == (self.dim,) and bool(np.all(x >= -tol) and abs(x.sum() - 1.0) <= tol)

    def project_normal_cone(self, x, v, tol=MEMBER_TOL):
        # N(x) = {w : w_i = t on supp(x), w_i <= t off supp(x), t real}.
        # For fixed t the projection is explicit; the optimal t is the root of
        # sum_s (v_s - t) + sum_o (v_o - t)_+ = 0, found over sorted breakpoints.
        supp = x > tol
        vs, vo = v[supp], v[~supp]
        if vs.size == 0:
            return v.copy()
        desc = np.sort(vo)[::-1]
        base = vs.sum()
        top = np.concatenate(([0.0], np.cumsum(desc)))
        t = base / vs.size
        for k in range(desc.size + 1):
            t = (base + top[k]) / (vs.size + k)
            if (k == 0 or desc[k - 1] >= t) and (k == desc.size or desc[k] <= t):
                break
        out = np.empty_like(v)
        out[supp] = t
        out[~supp] = np.minimum(vo, t)
        return out

    def sample(self, rng, size=1):
        return rng.dirichlet(np.ones(self.dim), size=size)

    def to_dict(self):
        return {"kind": "simplex", "dim": self.dim}


class Singleton(FeasibleSet):
    """The one-point set ``{point}``; its normal cone is the whole space."""

    kind = "singleton"

    def __init__(self, point):
        self.point = np.asarray(point, dtype=float).copy()
        super().__init__(self.point.size)

    def project(self, v):
        return self.point.copy()

    def project_normal_cone(self, x, v):
        return np.asarray(v, dtype=float).copy()

    def sample(self, rng, size=1):
        return np.tile(self.point, (size, 1))

    def to_dict(self):
        return {"kind": "singleton", "point": self.point.tolist()}
