"""
Run configuration validator.

Function validate_run_config(cfg) -> List[str]:
  - Returns an empty list when cfg passes the checks.
  - Returns a list of human-readable issue strings otherwise.
Checks performed:
  - known problem and method
  - 2 <= N_min < N_max
  - grid step divides the region when a grid is used; candidate count when sampling
  - escape thresholds, LHD restarts, EGO starts, slab multiplier
  - hyperparameter overrides name known scalar fields with positive values
"""
from __future__ import annotations

from typing import List

from barbf.config.run_config import (
    CANDIDATE_MODES,
    GRID,
    METHODS,
    OVERRIDABLE_HYPERPARAMS,
    UNIFORM,
    RunConfig,
)
from barbf.testbed.grid import grid_counts
from barbf.testbed.problems import get_problem


def validate_run_config(cfg: RunConfig) -> List[str]:
    issues: List[str] = []

    try:
        problem = get_problem(cfg.problem)
    except ValueError as exc:
        issues.append(str(exc))
        problem = None

    if cfg.method not in METHODS:
        issues.append(f"method '{cfg.method}' unknown; choose from {', '.join(METHODS)}")

    if cfg.n_min < 2:
        issues.append(f"n_min must be >= 2 (got {cfg.n_min})")
    if cfg.n_max <= cfg.n_min:
        issues.append(f"n_max must exceed n_min (got n_min={cfg.n_min}, n_max={cfg.n_max})")

    if cfg.candidate_mode is not None and cfg.candidate_mode not in CANDIDATE_MODES:
        issues.append(f"candidate_mode '{cfg.candidate_mode}' unknown; choose from {', '.join(CANDIDATE_MODES)}")
    elif problem is not None and cfg.method in METHODS:
        mode = cfg.resolved_candidate_mode(problem)
        step = cfg.resolved_grid_step(problem)
        if mode == GRID:
            if step is None:
                issues.append(f"problem '{problem.name}' has no grid; pass a grid step or use uniform candidates")
            else:
                try:
                    counts = grid_counts(problem.region, step)
                    size = 1
                    for c in counts:
                        size *= c
                    if size < cfg.n_max:
                        issues.append(f"grid of {size} points cannot hold a budget of {cfg.n_max} evaluations")
                except ValueError as exc:
                    issues.append(f"grid_step invalid: {exc}")
        elif mode == UNIFORM and cfg.n_candidates < 1:
            issues.append(f"n_candidates must be >= 1 for sampled candidates (got {cfg.n_candidates})")

    if cfg.c_slab is not None and not cfg.c_slab > 0:
        issues.append(f"c_slab must be > 0 (got {cfg.c_slab})")
    if cfg.escape_m_i < 1 or cfg.escape_m_t < 1:
        issues.append(f"escape thresholds must be >= 1 (got M_I={cfg.escape_m_i}, M_T={cfg.escape_m_t})")
    if cfg.lhd_restarts < 1:
        issues.append(f"lhd_restarts must be >= 1 (got {cfg.lhd_restarts})")
    if cfg.ego_starts < 1:
        issues.append(f"ego_starts must be >= 1 (got {cfg.ego_starts})")
    if cfg.loo_scales is not None:
        if len(cfg.loo_scales) == 0:
            issues.append("loo_scales must not be empty")
        elif any(not s > 0 for s in cfg.loo_scales):
            issues.append("loo_scales must all be > 0")

    for key, value in cfg.hyper_overrides.items():
        if key not in OVERRIDABLE_HYPERPARAMS:
            issues.append(f"hyper_overrides.{key} unknown; allowed: {', '.join(OVERRIDABLE_HYPERPARAMS)}")
            continue
        try:
            v = float(value)
        except (TypeError, ValueError):
            issues.append(f"hyper_overrides.{key} invalid: {value}")
            continue
        if key == "omega_mix":
            if not 0.0 <= v <= 1.0:
                issues.append(f"hyper_overrides.omega_mix must lie in [0, 1] (got {v})")
        elif key == "b_s":
            if v < 0:
                issues.append(f"hyper_overrides.b_s must be >= 0 (got {v})")
        elif not v > 0:
            issues.append(f"hyper_overrides.{key} must be > 0 (got {v})")

    return issues
