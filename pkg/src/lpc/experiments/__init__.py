"""Config-driven experiment harness: figure reproduction, reports, CLI."""

from .config import ConfigError, ExperimentConfig, parse_config_file, parse_config_text
from .report import RunReport, emit_report, read_report_csv
from .runner import (
    optimal_gamma,
    run_experiment,
    run_histogram,
    run_multiclass,
    run_noise_estimation,
    run_real_data,
    run_sweep,
    theory_csv,
)

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "RunReport",
    "emit_report",
    "optimal_gamma",
    "parse_config_file",
    "parse_config_text",
    "read_report_csv",
    "run_experiment",
    "run_histogram",
    "run_multiclass",
    "run_noise_estimation",
    "run_real_data",
    "run_sweep",
    "theory_csv",
]
