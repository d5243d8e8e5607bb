"""Command-line interface: ``fracsplit run|validate|list-experiments``."""

from .config import EXPERIMENTS, ConfigError, ExperimentConfig, default_config, load_config, validate_config
from .main import main

__all__ = ["EXPERIMENTS", "ConfigError", "ExperimentConfig", "default_config", "load_config", "validate_config",
           "main"]
