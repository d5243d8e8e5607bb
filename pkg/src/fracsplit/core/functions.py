"""Function oracles: convex (prox, conjugate, subgradients) and smooth (gradient).

Convex oracles implement the pieces a full-splitting method needs: the value,
the conjugate value, the proximal map, a deterministic subgradient selection,
and a parametrised description of the whole subdifferential (used by the
stationarity residual).
"""

from __future__ import annotations

import numpy as np

from .sets import project_l1_ball, project_simplex

__all__ = [
    "UnsupportedOperation",
    "SubdiffSet",
    "ConvexFunction",
    "ZeroFunction",
    "L1Norm",
    "LinfDistance",
    "L2Norm",
    "MaxBlockSquaredNorm",
    "LinearFunction",
    "Offset",
    "QuadAugmented",
    "SmoothFunction",
    "ZeroSmooth",
    "QuadraticForm",
    "LeastSquares",
    "ConvexifiedSmooth",
    "ACTIVE_TOL",
]

# relative tolerance for "attains the max" / "sits at the kink"
ACTIVE_TOL = 1e-8
# absolute slack when testing membership in the domain of an indicator conjugate
DOMAIN_TOL = 1e-9


class UnsupportedOperation(NotImplementedError):
    """Raised when an oracle has no rule for the requested operation."""


class SubdiffSet:
    """Compact convex set ``{center + basis @ lam : lam in Lambda}``.

    ``project`` maps a parameter vector onto ``Lambda``; ``basis=None`` means the
    parameters are the subgradient coordinates themselves.
    """

    def __init__(self, center, basis=None, project=None, start=None):
        self.center = np.asarray(center, dtype=float)
        self.basis = basis
        self._project = project
        dim = self.center.size if basis is None else basis.shape[1]
        self.start = np.zeros(dim) if start is None else np.asarray(start, dtype=float)
        if project is not None:
            self.start = project(self.start)

    @classmethod
    def point(cls, v):
        v = np.asarray(v, dtype=float)
        return cls(v, basis=np.zeros((v.size, 0)), start=np.zeros(0))

    @property
    def n_params(self):
        return self.start.size

    def element(self, lam):
        if self.basis is None:
            return self.center + lam
        return self.center + self.basis @ lam

    def pullback(self, g):
        """Chain rule: gradient w.r.t. parameters given gradient w.r.t. the element."""
        return g if self.basis is None else self.basis.T @ g

    def project(self, lam):
        return lam if self._project is None else self._project(lam)

    def shifted(self, offset):
        return SubdiffSet(self.center + offset, self.basis, self._project, self.start)


def _hull_of(vertices):
    """Subdifferential set given as the convex hull of the columns of ``vertices``."""
    k = vertices.shape[1]
    if k == 1:
        return SubdiffSet.point(vertices[:, 0])
    return SubdiffSet(np.zeros(vertices.shape[0]), basis=vertices, project=project_simplex,
                      start=np.full(k, 1.0 / k))


def _indicator(ok):
    return 0.0 if ok else np.inf


class ConvexFunction:
    """Proper, convex, lsc function with proximal and conjugate oracles."""

    name = "convex"
    lipschitz = None

    def value(self, x):
        raise NotImplementedError

    def __call__(self, x):
        return self.value(x)

    def conjugate(self, z):
        raise UnsupportedOperation(f"{self.name}: conjugate value not available")

    def prox(self, v, kappa):
        """``argmin_y value(y) + ||y - v||^2 / (2 kappa)``."""
        raise UnsupportedOperation(f"{self.name}: no proximal rule")

    def prox_conjugate(self, v, kappa):
        """Prox of the conjugate with modulus ``kappa`` via the Moreau identity."""
        if kappa <= 0:
            raise ValueError("kappa must be positive")
        v = np.asarray(v, dtype=float)
        return v - kappa * self.prox(v / kappa, 1.0 / kappa)

    def subgradient(self, x):
        raise UnsupportedOperation(f"{self.name}: no subgradient rule")

    def subdifferential(self, x, tol=ACTIVE_TOL):
        raise UnsupportedOperation(f"{self.name}: subdifferential not parametrised")

    def to_dict(self):
        raise UnsupportedOperation(f"{self.name}: not serialisable")


class ZeroFunction(ConvexFunction):
    name = "zero"

    def value(self, x):
        return 0.0

    def conjugate(self, z):
        return _indicator(np.linalg.norm(z, np.inf) <= DOMAIN_TOL)

    def prox(self, v, kappa):
        return np.array(v, dtype=float)

    def prox_conjugate(self, v, kappa):
        return np.zeros_like(np.asarray(v, dtype=float))

    def subgradient(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def subdifferential(self, x, tol=ACTIVE_TOL):
        return SubdiffSet.point(np.zeros(np.size(x)))

    def to_dict(self):
        return {"kind": "zero"}


class L1Norm(ConvexFunction):
    """``scale * ||x||_1``."""

    name = "l1"

    def __init__(self, scale=1.0):
        if scale <= 0:
            raise ValueError("scale must be positive")
        self.scale = float(scale)

    def value(self, x):
        return self.scale * float(np.abs(x).sum())

    def conjugate(self, z):
        return _indicator(np.max(np.abs(z), initial=0.0) <= self.scale * (1 + DOMAIN_TOL) + DOMAIN_TOL)

    def prox(self, v, kappa):
        v = np.asarray(v, dtype=float)
        return np.sign(v) * np.maximum(np.abs(v) - kappa * self.scale, 0.0)

    def prox_conjugate(self, v, kappa):
        # conjugate is the indicator of the inf-ball of radius `scale`
        return np.clip(v, -self.scale, self.scale)

    def subgradient(self, x):
        return self.scale * np.sign(x)

    def subdifferential(self, x, tol=ACTIVE_TOL):
        x = np.asarray(x, dtype=float)
        kink = np.abs(x) <= tol * max(1.0, np.max(np.abs(x), initial=0.0))
        lo = np.where(kink, -self.scale, self.scale * np.sign(x))
        hi = np.where(kink, self.scale, self.scale * np.sign(x))
        return SubdiffSet(np.zeros(x.size), project=lambda lam: np.clip(lam, lo, hi), start=(lo + hi) / 2)

    def to_dict(self):
        return {"kind": "l1", "scale": self.scale}


class LinfDistance(ConvexFunction):
    """``||r - x||_inf`` (the numerator of the robust ratio model)."""

    name = "linf_distance"

    def __init__(self, r):
        self.r = np.asarray(r, dtype=float).copy()
        self.lipschitz = 1.0

    def value(self, x):
        return float(np.max(np.abs(self.r - x)))

    def conjugate(self, z):
        z = np.asarray(z, dtype=float)
        if np.abs(z).sum() > 1 + DOMAIN_TOL:
            return np.inf
        return float(z @ self.r)

    def prox(self, v, kappa):
        w = np.asarray(v, dtype=float) - self.r
        # prox of kappa*||.||_inf by Moreau: w - kappa * P_{l1 ball}(w / kappa)
        return self.r + w - kappa * project_l1_ball(w / kappa)

    def prox_conjugate(self, v, kappa):
        return project_l1_ball(np.asarray(v, dtype=float) - kappa * self.r)

    def subgradient(self, x):
        w = np.asarray(x, dtype=float) - self.r
        out = np.zeros_like(w)
        a = np.abs(w)
        if a.max() > 0:
            i = int(np.argmax(a))  # lowest index among maximisers
            out[i] = np.sign(w[i])
        return out

    def subdifferential(self, x, tol=ACTIVE_TOL):
        w = np.asarray(x, dtype=float) - self.r
        a = np.abs(w)
        top = a.max()
        if top == 0:
            return SubdiffSet(np.zeros(w.size), project=project_l1_ball)
        active = np.flatnonzero(a >= top - tol * max(1.0, top))
        verts = np.zeros((w.size, active.size))
        verts[active, np.arange(active.size)] = np.sign(w[active])
        return _hull_of(verts)

    def to_dict(self):
        return {"kind": "linf_distance", "r": self.r.tolist()}


class L2Norm(ConvexFunction):
    """Euclidean norm."""

    name = "l2"
    lipschitz = 1.0

    def value(self, x):
        return float(np.linalg.norm(x))

    def conjugate(self, z):
        return _indicator(np.linalg.norm(z) <= 1 + DOMAIN_TOL)

    def prox(self, v, kappa):
        v = np.asarray(v, dtype=float)
        nv = np.linalg.norm(v)
        if nv <= kappa:
            return np.zeros_like(v)
        return (1 - kappa / nv) * v

    def prox_conjugate(self, v, kappa):
        v = np.asarray(v, dtype=float)
        nv = np.linalg.norm(v)
        return v if nv <= 1 else v / nv

    def subgradient(self, x):
        x = np.asarray(x, dtype=float)
        nx = np.linalg.norm(x)
        return np.zeros_like(x) if nx == 0 else x / nx

    def subdifferential(self, x, tol=ACTIVE_TOL):
        x = np.asarray(x, dtype=float)
        nx = np.linalg.norm(x)
        if nx == 0:
            def ball(lam):
                nl = np.linalg.norm(lam)
                return lam if nl <= 1 else lam / nl
            return SubdiffSet(np.zeros(x.size), project=ball)
        return SubdiffSet.point(x / nx)

    def to_dict(self):
        return {"kind": "l2"}


class MaxBlockSquaredNorm(ConvexFunction):
    """``max_i ||x_i||^2`` over consecutive blocks of the given sizes."""

    name = "max_block_sq"

    def __init__(self, block_sizes):
        self.block_sizes = [int(b) for b in block_sizes]
        self._edges = np.cumsum([0] + self.block_sizes)

    def _blocks(self, x):
        return [x[lo:hi] for lo, hi in zip(self._edges[:-1], self._edges[1:])]

    def block_values(self, x):
        return np.array([b @ b for b in self._blocks(np.asarray(x, dtype=float))])

    def value(self, x):
        return float(self.block_values(x).max())

    def conjugate(self, y):
        # sup_x <y,x> - max_i ||x_i||^2 = (sum_i ||y_i||)^2 / 4
        s = sum(np.linalg.norm(b) for b in self._blocks(np.asarray(y, dtype=float)))
        return 0.25 * s * s

    def subgradient(self, x):
        x = np.asarray(x, dtype=float)
        j = int(np.argmax(self.block_values(x)))  # lowest-index argmax block
        out = np.zeros_like(x)
        lo, hi = self._edges[j], self._edges[j + 1]
        out[lo:hi] = 2 * x[lo:hi]
        return out

    def subdifferential(self, x, tol=ACTIVE_TOL):
        x = np.asarray(x, dtype=float)
        vals = self.block_values(x)
        top = vals.max()
        active = np.flatnonzero(vals >= top - tol * max(1.0, top))
        verts = np.zeros((x.size, active.size))
        for col, j in enumerate(active):
            lo, hi = self._edges[j], self._edges[j + 1]
            verts[lo:hi, col] = 2 * x[lo:hi]
        return _hull_of(verts)

    def to_dict(self):
        return {"kind": "max_block_sq", "block_sizes": self.block_sizes}


class LinearFunction(ConvexFunction):
    """``<c, x> + offset``."""

    name = "linear"

    def __init__(self, c, offset=0.0):
        self.c = np.asarray(c, dtype=float).copy()
        self.offset = float(offset)
        self.lipschitz = float(np.linalg.norm(self.c))

    def value(self, x):
        return float(self.c @ x) + self.offset

    def conjugate(self, z):
        return _indicator(np.linalg.norm(np.asarray(z) - self.c) <= DOMAIN_TOL * (1 + np.linalg.norm(self.c))) - self.offset

    def prox(self, v, kappa):
        return np.asarray(v, dtype=float) - kappa * self.c

    def prox_conjugate(self, v, kappa):
        return self.c.copy()

    def subgradient(self, x):
        return self.c.copy()

    def subdifferential(self, x, tol=ACTIVE_TOL):
        return SubdiffSet.point(self.c)

    def to_dict(self):
        return {"kind": "linear", "c": self.c.tolist(), "offset": self.offset}


class Offset(ConvexFunction):
    """``base(x) + const``."""

    def __init__(self, base, const):
        self.base = base
        self.const = float(const)
        self.name = f"{base.name}+const"
        self.lipschitz = base.lipschitz

    def value(self, x):
        return self.base.value(x) + self.const

    def conjugate(self, z):
        return self.base.conjugate(z) - self.const

    def prox(self, v, kappa):
        return self.base.prox(v, kappa)

    def prox_conjugate(self, v, kappa):
        return self.base.prox_conjugate(v, kappa)

    def subgradient(self, x):
        return self.base.subgradient(x)

    def subdifferential(self, x, tol=ACTIVE_TOL):
        return self.base.subdifferential(x, tol)

    def to_dict(self):
        return {"kind": "offset", "base": self.base.to_dict(), "const": self.const}


class QuadAugmented(ConvexFunction):
    """``base(x) + (s/2)||x||^2``, the strongly convex reformulation of ``base``."""

    def __init__(self, base, s):
        if s <= 0:
            raise ValueError("s must be positive")
        self.base = base
        self.s = float(s)
        self.name = f"{base.name}+quad"

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return self.base.value(x) + 0.5 * self.s * float(x @ x)

    def conjugate(self, z):
        # the conjugate is differentiable with gradient p = prox_{base,1/s}(z/s)
        z = np.asarray(z, dtype=float)
        p = self.base.prox(z / self.s, 1.0 / self.s)
        return float(z @ p) - self.value(p)

    def prox(self, v, kappa):
        t = 1.0 + kappa * self.s
        return self.base.prox(np.asarray(v, dtype=float) / t, kappa / t)

    def subgradient(self, x):
        return self.base.subgradient(x) + self.s * np.asarray(x, dtype=float)

    def subdifferential(self, x, tol=ACTIVE_TOL):
        return self.base.subdifferential(x, tol).shifted(self.s * np.asarray(x, dtype=float))

    def to_dict(self):
        return {"kind": "quad_augmented", "base": self.base.to_dict(), "s": self.s}


class SmoothFunction:
    """Differentiable function with Lipschitz gradient."""

    name = "smooth"
    lipschitz = 0.0

    def value(self, x):
        raise NotImplementedError

    def __call__(self, x):
        return self.value(x)

    def grad(self, x):
        raise NotImplementedError

    def to_dict(self):
        raise UnsupportedOperation(f"{self.name}: not serialisable")


class ZeroSmooth(SmoothFunction):
    name = "zero"

    def value(self, x):
        return 0.0

    def grad(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def to_dict(self):
        return {"kind": "zero"}


class QuadraticForm(SmoothFunction):
    """``scale * ||x||^2 + const``."""

    name = "quadratic"

    def __init__(self, scale=0.5, const=0.0):
        self.scale = float(scale)
        self.const = float(const)
        self.lipschitz = 2 * abs(self.scale)

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return self.scale * float(x @ x) + self.const

    def grad(self, x):
        return 2 * self.scale * np.asarray(x, dtype=float)

    def to_dict(self):
        return {"kind": "quadratic", "scale": self.scale, "const": self.const}


class LeastSquares(SmoothFunction):
    """``0.5 * ||op(x) - b||^2``."""

    name = "least_squares"

    def __init__(self, op, b):
        self.op = op
        self.b = np.asarray(b, dtype=float).copy()

    @property
    def lipschitz(self):
        return self.op.norm ** 2

    def value(self, x):
        r = self.op.apply(x) - self.b
        return 0.5 * float(r @ r)

    def grad(self, x):
        return self.op.adjoint(self.op.apply(x) - self.b)

    def to_dict(self):
        from .io import operator_to_dict
        return {"kind": "least_squares", "op": operator_to_dict(self.op), "b": self.b.tolist()}


class ConvexifiedSmooth(SmoothFunction):
    """``base(x) - (s/2)||op(x)||^2``, companion of :class:`QuadAugmented`."""

    def __init__(self, base, op, s):
        self.base = base
        self.op = op
        self.s = float(s)
        self.name = f"{base.name}-quad"

    @property
    def lipschitz(self):
        return self.base.lipschitz + self.s * self.op.norm ** 2

    def value(self, x):
        ax = self.op.apply(x)
        return self.base.value(x) - 0.5 * self.s * float(ax @ ax)

    def grad(self, x):
        return self.base.grad(x) - self.s * self.op.adjoint(self.op.apply(x))
