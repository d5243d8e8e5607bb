"""Evaluation metrics and the lifted stationarity residual."""

from .image import SSIM_C, SSIM_WINDOW, infeas, rerr, rmse, ssim
from .report import MetricReport
from .stationarity import STAT_ITERS, stat_residual, stat_residual_info
