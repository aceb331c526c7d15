"""
Marshmallow schemas for JSON run and experiment files.

An experiment file looks like::

    {
      "name": "branin-barbf-desk",
      "reps": 20,
      "seed": 2024,
      "run": {"problem": "branin", "method": "barbf", "n_min": 16, "n_max": 46,
              "chain": {"n_iter": 2000}}
    }

Unknown keys are rejected so typos surface instead of silently falling back
to defaults.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping, Union

from marshmallow import RAISE, Schema, ValidationError, fields, post_load, validate, validates_schema

from barbf.config.run_config import CANDIDATE_MODES, METHODS, OVERRIDABLE_HYPERPARAMS, Experiment, RunConfig
from barbf.surrogate.mcmc import S_MODES, ChainConfig


class ChainConfigSchema(Schema):
    class Meta:
        unknown = RAISE

    n_iter = fields.Int(validate=validate.Range(min=1))
    burn_frac = fields.Float(validate=validate.Range(min=0.0, max=1.0, max_inclusive=False))
    thin = fields.Int(validate=validate.Range(min=1))
    update_mu = fields.Bool()
    update_s_mode = fields.Str(validate=validate.OneOf(S_MODES))

    @post_load
    def make(self, data, **kwargs) -> ChainConfig:
        return ChainConfig(**data)


class RunConfigSchema(Schema):
    class Meta:
        unknown = RAISE

    problem = fields.Str()
    method = fields.Str(validate=validate.OneOf(METHODS))
    n_min = fields.Int(validate=validate.Range(min=2))
    n_max = fields.Int(validate=validate.Range(min=3))
    grid_step = fields.Float(allow_none=True, validate=validate.Range(min=0.0, min_inclusive=False))
    n_candidates = fields.Int(validate=validate.Range(min=1))
    candidate_mode = fields.Str(allow_none=True, validate=validate.OneOf(CANDIDATE_MODES))
    chain = fields.Nested(ChainConfigSchema)
    c_slab = fields.Float(allow_none=True, validate=validate.Range(min=0.0, min_inclusive=False))
    hyper_overrides = fields.Dict(
        keys=fields.Str(validate=validate.OneOf(OVERRIDABLE_HYPERPARAMS)), values=fields.Float()
    )
    escape_m_i = fields.Int(validate=validate.Range(min=1))
    escape_m_t = fields.Int(validate=validate.Range(min=1))
    seed = fields.Int(allow_none=True)
    lhd_restarts = fields.Int(validate=validate.Range(min=1))
    warm_start = fields.Bool()
    loo_scales = fields.List(fields.Float(validate=validate.Range(min=0.0, min_inclusive=False)), allow_none=True)
    record_diagnostics = fields.Bool()
    ego_starts = fields.Int(validate=validate.Range(min=1))

    @validates_schema
    def check_budget(self, data, **kwargs):
        n_min = data.get("n_min", RunConfig.n_min)
        n_max = data.get("n_max", RunConfig.n_max)
        if n_max <= n_min:
            raise ValidationError(f"n_max ({n_max}) must exceed n_min ({n_min})", "n_max")

    @post_load
    def make(self, data, **kwargs) -> RunConfig:
        if data.get("loo_scales") is not None:
            data["loo_scales"] = tuple(data["loo_scales"])
        return RunConfig(**data)


class ExperimentSchema(Schema):
    class Meta:
        unknown = RAISE

    name = fields.Str()
    description = fields.Str()
    run = fields.Nested(RunConfigSchema, required=True)
    reps = fields.Int(validate=validate.Range(min=1))
    seed = fields.Int()
    jobs = fields.Int(allow_none=True, validate=validate.Range(min=1))
    strict = fields.Bool()
    out = fields.Str(allow_none=True)

    @post_load
    def make(self, data, **kwargs) -> Experiment:
        return Experiment(**data)


def format_errors(messages: Any, prefix: str = "") -> list[str]:
    """Flatten marshmallow's nested error dict into ``field.path: message`` lines."""
    if isinstance(messages, Mapping):
        out: list[str] = []
        for key, value in messages.items():
            out.extend(format_errors(value, f"{prefix}.{key}" if prefix else str(key)))
        return out
    if isinstance(messages, (list, tuple)):
        return [f"{prefix}: {m}" if prefix else str(m) for m in messages]
    return [f"{prefix}: {messages}" if prefix else str(messages)]


def experiment_from_dict(raw: Mapping[str, Any]) -> Experiment:
    try:
        return ExperimentSchema().load(raw)
    except ValidationError as exc:
        raise ValueError("Invalid experiment file: " + "; ".join(format_errors(exc.messages))) from exc


def load_experiment(path: Union[str, Path]) -> Experiment:
    """Read and validate an experiment JSON file."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ValueError(f"could not read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, Mapping):
        raise ValueError(f"config file {path} must hold a JSON object")
    return experiment_from_dict(raw)
