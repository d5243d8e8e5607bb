"""Full-splitting proximal subgradient methods for single-ratio fractional programs."""

__version__ = "0.1.0"
