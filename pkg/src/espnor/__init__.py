"""Electrostatic interaction energies from ESP-natural-orbital occupations on a simulated quantum register."""

from .config import NoiseSpec, OptimizerConfig, RunConfig, ZneConfig, load_config
from .model_io import ProblemInstance, generate_synthetic_instance, load_instance, save_instance
from .pipeline import compare_reports, oracle_report, prepare_pipeline, run_report

__version__ = "0.1.0"

__all__ = [
    "NoiseSpec",
    "OptimizerConfig",
    "ProblemInstance",
    "RunConfig",
    "ZneConfig",
    "compare_reports",
    "generate_synthetic_instance",
    "load_config",
    "load_instance",
    "oracle_report",
    "prepare_pipeline",
    "run_report",
    "save_instance",
]
