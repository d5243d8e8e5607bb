"""Problem constructors: toy instances, robust ratio generator and limited-angle CT."""

from .export import read_pgm, write_csv_vector, write_pgm, write_sinogram_csv
from .sharp_ratio import (SHARP_RATIO_S, SHARP_RATIO_SCENARIOS, SharpRatioInstance, make_sharp_ratio,
                          sharp_ratio_data)
from .tomography import (CT_S, CT_TAU, CtInstance, angles_for_range, default_detectors, discrete_gradient,
                         make_ct_instance, make_ct_problem, parallel_beam_projector, shepp_logan)
from .toy import TOY_BETAS, ToySetup, dct2, make_divergence_instance, make_quadratic_over_abs, make_toy_recovery
