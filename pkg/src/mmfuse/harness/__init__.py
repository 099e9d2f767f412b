"""Experiment orchestration, synthetic cohorts, reports and the ``fuse`` CLI."""
from .config import ExperimentConfig, default_config, load_config, parse_config, render_config
from .pipeline import (FittedPipeline, ReportBundle, RuleDump, SelectionReport, cell_rules,
                       load_cohort, run_pipeline, selection_only)
from .report import render_tables
from .synthetic import GenParams, generate_synthetic, synthesize

__all__ = [
    "ExperimentConfig", "GenParams", "FittedPipeline", "ReportBundle", "RuleDump", "SelectionReport",
    "cell_rules", "default_config", "generate_synthetic", "load_cohort", "load_config",
    "parse_config", "render_config", "render_tables", "run_pipeline", "selection_only", "synthesize",
]
