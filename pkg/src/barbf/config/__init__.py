"""Run configuration, JSON schemas, validation and bundled presets."""

from barbf.config.presets import load_preset, preset_names
from barbf.config.run_config import METHODS, Experiment, RunConfig
from barbf.config.schema import ExperimentSchema, RunConfigSchema, load_experiment
from barbf.config.validator import validate_run_config

__all__ = [
    "METHODS",
    "Experiment",
    "ExperimentSchema",
    "RunConfig",
    "RunConfigSchema",
    "load_experiment",
    "load_preset",
    "preset_names",
    "validate_run_config",
]
