"""The ``gamma = 0`` variant of FSPS on the cycling instance."""

from __future__ import annotations

import numpy as np

from ..problems.toy import make_divergence_instance
from ..solvers.fsps import fsps_run

__all__ = ["min_norm_dual", "divergence_harness"]


def min_norm_dual(w):
    """Minimum-norm maximiser of ``<z, w>`` over the unit inf-ball: ``sign(w)`` with 0 where ``w = 0``."""
    return np.sign(w)


def divergence_harness(iterations=100, keep_iterates=True):
    """Run FSPS with ``beta = 1``, ``gamma_k = 0``, ``delta_k = 1``, ``theta0 = 1`` from ``(0, 1)``.

    The dual update takes the minimum-norm solution of ``min_z g*(z) - <z, Ax>``.
    The iterates cycle between ``(1, 0)`` and ``(0, 1)``. Returns the trace.
    """
    if iterations < 2:
        raise ValueError("iterations must be >= 2")
    setup = make_divergence_instance()
    _, trace, _ = fsps_run(setup.problem, beta=1.0, gamma_schedule=lambda k: 0.0, delta_schedule=lambda k: 1.0,
                           theta0=setup.theta0, x0=setup.x0, z0=setup.z0, u0=setup.u0, max_iter=iterations,
                           z_update=lambda Ax, gamma: min_norm_dual(Ax), keep_iterates=keep_iterates)
    trace.method = "fsps-gamma0"
    return trace
