"""Comparison methods: Dinkelbach iterations, SART and the cycling gamma = 0 variant."""

from .dinkelbach import DinkelbachConfig, dinkelbach_run, dinkelbach_subproblem, subproblem_objective
from .divergence import divergence_harness, min_norm_dual
from .sart import sart_run
