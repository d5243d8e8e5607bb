"""Matrix-free linear operators with adjoints and norm estimates."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

__all__ = [
    "LinearOperator",
    "IdentityOperator",
    "MatrixOperator",
    "StackedOperator",
    "op_norm_estimate",
    "adjoint_mismatch",
]

NORM_ITERS = 100
NORM_SEED = 0


def op_norm_estimate(op, iters=NORM_ITERS, seed=NORM_SEED):
    """Estimate ``||op||`` by power iteration on ``op* op``.

    The start vector is drawn from ``numpy.random.default_rng(seed)`` so the
    estimate is reproducible. The returned value is a lower bound that is
    tight once the iteration has converged.
    """
    if iters < 1:
        raise ValueError("iters must be >= 1")
    if op.shape[0] == 0 or op.shape[1] == 0:
        raise ValueError("cannot estimate the norm of a zero-dimensional operator")
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(op.shape[1])
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(iters):
        w = op.adjoint(op.apply(v))
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        est = np.sqrt(nw)
        v = w / nw
    # Rayleigh quotient of the final vector is the sharper estimate.
    return float(max(est, np.linalg.norm(op.apply(v))))


def adjoint_mismatch(op, x, y):
    """Return ``|<Ax, y> - <x, A*y>| / (1 + ||x|| ||y||)``."""
    lhs = np.dot(op.apply(x), y)
    rhs = np.dot(x, op.adjoint(y))
    return abs(lhs - rhs) / (1.0 + np.linalg.norm(x) * np.linalg.norm(y))


class LinearOperator:
    """A linear map ``R^n -> R^m`` given by forward and adjoint callables.

    Parameters
    ----------
    shape : (m, n)
        Output and input dimensions.
    apply, adjoint : callable
        Forward map and its adjoint.
    norm : float, optional
        Known operator norm. When omitted it is estimated lazily by power
        iteration and cached.
    """

    def __init__(self, shape, apply, adjoint, norm=None, name="linop"):
        m, n = (int(shape[0]), int(shape[1]))
        if m <= 0 or n <= 0:
            raise ValueError(f"operator dimensions must be positive, got {shape}")
        self.shape = (m, n)
        self._apply = apply
        self._adjoint = adjoint
        self._norm = None if norm is None else float(norm)
        self.name = name

    @property
    def n_in(self):
        return self.shape[1]

    @property
    def n_out(self):
        return self.shape[0]

    def apply(self, x):
        return self._apply(np.asarray(x, dtype=float))

    def adjoint(self, y):
        return self._adjoint(np.asarray(y, dtype=float))

    __call__ = apply

    @property
    def norm(self):
        if self._norm is None:
            self._norm = op_norm_estimate(self)
        return self._norm

    def __repr__(self):
        return f"{type(self).__name__}({self.name!r}, shape={self.shape})"


class IdentityOperator(LinearOperator):
    def __init__(self, n):
        super().__init__((n, n), lambda x: x.copy(), lambda y: y.copy(), norm=1.0, name="identity")


class MatrixOperator(LinearOperator):
    """Operator backed by a dense array or a scipy sparse matrix."""

    def __init__(self, matrix, name="matrix", norm=None):
        if sp.issparse(matrix):
            mat = sp.csr_matrix(matrix, dtype=float)
        else:
            mat = np.atleast_2d(np.asarray(matrix, dtype=float))
        self.matrix = mat
        matT = mat.T.tocsr() if sp.issparse(mat) else mat.T
        super().__init__(mat.shape, lambda x: mat @ x, lambda y: matT @ y, norm=norm, name=name)


class StackedOperator(LinearOperator):
    """Vertical stack ``x -> (B_1 x, ..., B_k x)`` of operators on the same input."""

    def __init__(self, blocks, name="stack"):
        blocks = list(blocks)
        n = blocks[0].shape[1]
        if any(b.shape[1] != n for b in blocks):
            raise ValueError("stacked operators must share the input dimension")
        sizes = [b.shape[0] for b in blocks]
        offsets = np.cumsum([0] + sizes)
        self.blocks = blocks
        self.block_sizes = sizes

        def fwd(x):
            return np.concatenate([b.apply(x) for b in blocks])

        def adj(y):
            out = np.zeros(n)
            for b, lo, hi in zip(blocks, offsets[:-1], offsets[1:]):
                out += b.adjoint(y[lo:hi])
            return out

        super().__init__((int(offsets[-1]), n), fwd, adj, name=name)
