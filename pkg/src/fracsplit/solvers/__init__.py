"""FSPS solvers, merit functions, traces and invariant checks."""

from .checks import (descent_check, fenchel_check, gamma_merit_check, merit_consistency_check,
                     stopping_check, theta_monotone_check, window_decrease_check)
from .config import STOP_RULES, FspsConfig
from .fsps import SolverState, adaptive_fsps_run, default_dual_start, delta_rule, fsps_run, fsps_step
from .merit import merit_gamma, merit_pi, psi
from .nls import nls_run, nls_staged_run
from .trace import TRACE_COLUMNS, IterationTrace, RunReport, ThetaBacktrackExhausted
