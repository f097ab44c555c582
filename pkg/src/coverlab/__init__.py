"""Exact verification of a tower of Z_2^3 covers of the plane ending in a surface
with p_g = 3, q = 2, K^2 = 16 whose canonical map has degree 16."""

from .config import RunConfig, build_configuration, default_config, load_config
from .tower import TowerReport, run_pipeline

__version__ = "0.1.0"

__all__ = ["RunConfig", "TowerReport", "build_configuration", "default_config", "load_config",
           "run_pipeline", "__version__"]
