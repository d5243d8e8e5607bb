"""JSON round-trip for problem instances.

A problem is stored by its unconvexified data plus the ``shift`` and
``s_cvx`` scalars; convexification is re-applied on load.
"""

from __future__ import annotations

import json

import numpy as np
import scipy.sparse as sp

from . import functions as fn
from .operators import IdentityOperator, MatrixOperator, StackedOperator
from .problem import FractionalProblem, convexify
from .sets import Box, Simplex, Singleton

__all__ = ["operator_to_dict", "operator_from_dict", "problem_to_dict", "problem_from_dict",
           "save_problem", "load_problem"]


def operator_to_dict(op):
    spec = getattr(op, "spec", None)
    if spec is not None:
        return dict(spec)
    if isinstance(op, IdentityOperator):
        return {"kind": "identity", "n": op.shape[0]}
    if isinstance(op, StackedOperator):
        return {"kind": "stack", "blocks": [operator_to_dict(b) for b in op.blocks]}
    if isinstance(op, MatrixOperator):
        mat = op.matrix.toarray() if sp.issparse(op.matrix) else op.matrix
        return {"kind": "matrix", "data": mat.tolist()}
    raise fn.UnsupportedOperation(f"cannot serialise operator {op!r}")


def operator_from_dict(d):
    kind = d["kind"]
    if kind == "identity":
        return IdentityOperator(d["n"])
    if kind == "matrix":
        return MatrixOperator(np.array(d["data"], dtype=float))
    if kind == "stack":
        return StackedOperator([operator_from_dict(b) for b in d["blocks"]])
    if kind == "gradient":
        from ..problems.tomography import discrete_gradient
        return discrete_gradient(d["n_img"])
    if kind == "parallel_beam":
        from ..problems.tomography import parallel_beam_projector
        return parallel_beam_projector(d["n_img"], d["angles_deg"], d["detectors"])
    raise ValueError(f"unknown operator kind {kind!r}")


def set_from_dict(d):
    kind = d["kind"]
    if kind == "box":
        return Box(d["lower"], d["upper"], dim=d.get("dim"))
    if kind == "simplex":
        return Simplex(d["dim"])
    if kind == "singleton":
        return Singleton(d["point"])
    raise ValueError(f"unknown set kind {kind!r}")


def convex_from_dict(d):
    kind = d["kind"]
    if kind == "zero":
        return fn.ZeroFunction()
    if kind == "l1":
        return fn.L1Norm(d.get("scale", 1.0))
    if kind == "linf_distance":
        return fn.LinfDistance(d["r"])
    if kind == "l2":
        return fn.L2Norm()
    if kind == "max_block_sq":
        return fn.MaxBlockSquaredNorm(d["block_sizes"])
    if kind == "linear":
        return fn.LinearFunction(d["c"], d.get("offset", 0.0))
    if kind == "offset":
        return fn.Offset(convex_from_dict(d["base"]), d["const"])
    if kind == "quad_augmented":
        return fn.QuadAugmented(convex_from_dict(d["base"]), d["s"])
    raise ValueError(f"unknown convex function kind {kind!r}")


def smooth_from_dict(d):
    kind = d["kind"]
    if kind == "zero":
        return fn.ZeroSmooth()
    if kind == "quadratic":
        return fn.QuadraticForm(d.get("scale", 0.5), d.get("const", 0.0))
    if kind == "least_squares":
        return fn.LeastSquares(operator_from_dict(d["op"]), d["b"])
    raise ValueError(f"unknown smooth function kind {kind!r}")


def problem_to_dict(problem):
    root = problem.original
    out = {
        "name": problem.name,
        "set": root.S.to_dict(),
        "A": operator_to_dict(root.A),
        "K": operator_to_dict(root.K),
        "g": root.g.to_dict(),
        "f": root.f.to_dict(),
        "h": root.h.to_dict(),
        "shift": problem.shift,
        "s_cvx": problem.s_cvx,
    }
    if problem.x_true is not None:
        out["x_true"] = np.asarray(problem.x_true).tolist()
    return out


def problem_from_dict(d):
    x_true = d.get("x_true")
    prob = FractionalProblem(
        S=set_from_dict(d["set"]),
        A=operator_from_dict(d["A"]),
        K=operator_from_dict(d["K"]),
        g=convex_from_dict(d["g"]),
        f=convex_from_dict(d["f"]),
        h=smooth_from_dict(d["h"]),
        shift=float(d.get("shift", 0.0)),
        x_true=None if x_true is None else np.asarray(x_true, dtype=float),
        name=d.get("name", "problem"),
    )
    if d.get("s_cvx", 0.0) > 0:
        prob = convexify(prob, float(d["s_cvx"]))
    return prob


def save_problem(problem, path):
    with open(path, "w") as fh:
        json.dump(problem_to_dict(problem), fh)


def load_problem(path):
    with open(path) as fh:
        return problem_from_dict(json.load(fh))
