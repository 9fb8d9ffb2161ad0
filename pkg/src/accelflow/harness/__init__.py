"""Experiment harness: configs, runners, the acceptance suite, and the CLI."""

from .acceptance import CHECKS, DEFAULT_SUITE_SEED, acceptance_suite
from .cli import build_parser, main
from .config import (
    CONFIG_FIELDS,
    FLOW_FAMILIES,
    METHOD_KEYS,
    OPTIMIZE_ALGORITHMS,
    ExperimentConfig,
    config_from,
    load_config,
)
from .experiments import run_experiment
from .reporting import (
    EXPERIMENT_KINDS,
    SUMMARY_SCHEMA,
    CheckResult,
    ReportSummary,
    log_gap_columns,
    validate_summary,
    write_plot_data,
)

__all__ = [
    "CHECKS",
    "CONFIG_FIELDS",
    "DEFAULT_SUITE_SEED",
    "EXPERIMENT_KINDS",
    "FLOW_FAMILIES",
    "METHOD_KEYS",
    "OPTIMIZE_ALGORITHMS",
    "SUMMARY_SCHEMA",
    "CheckResult",
    "ExperimentConfig",
    "ReportSummary",
    "acceptance_suite",
    "build_parser",
    "config_from",
    "load_config",
    "log_gap_columns",
    "main",
    "run_experiment",
    "validate_summary",
    "write_plot_data",
]
