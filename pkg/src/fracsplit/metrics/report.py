"""Bundle of final metrics for one run."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

__all__ = ["MetricReport"]


@dataclass
class MetricReport:
    obj: float
    infeas: float
    stat: float | None = None
    rmse: float | None = None
    ssim: float | None = None
    rerr: float | None = None
    wall_time: float = 0.0
    iterations: int = 0

    def __post_init__(self):
        for name, val in asdict(self).items():
            if val is not None and not math.isfinite(val):
                raise ValueError(f"metric {name} is not finite: {val!r}")

    def to_dict(self):
        return {k: v for k, v in asdict(self).items() if v is not None}
