"""Sequential optimization loop shared by all methods.

A run evaluates a maximin Latin hypercube of ``n_min`` points, then adds one
point per iteration until ``n_max`` evaluations: refit the surrogate, choose
the next point from the candidate set, evaluate it. Seeds are split so that
the initial design depends only on the master seed, never on the method.
"""
from __future__ import annotations

import logging
import time
from dataclasses import replace
from typing import Optional

import numpy as np
import pandas as pd

from barbf.acquisition.escape import EscapeState, record_escape_point, update_escape
from barbf.acquisition.selection import (
    AcquisitionContext,
    Selection,
    acquisition_scores,
    maximin_distance_point,
    sample_candidates_uniform,
    select_next,
)
from barbf.baselines.ego import ego_fit, ego_select
from barbf.baselines.gmsrbf import WeightCycle, choose_scale_loo, gmsrbf_fit, gmsrbf_select
from barbf.config.run_config import BAYESIAN_METHODS, EGO, GMSRBF, GRID, M_BARBF, RunConfig
from barbf.config.validator import validate_run_config
from barbf.design.lhd import maximin_lhd, snap_to_grid
from barbf.errors import DuplicatePointError, ObjectiveEvaluationError
from barbf.optimizer.trace import RunTrace
from barbf.surrogate.mcmc import SHARED_S, default_hyperparams, run_chain
from barbf.surrogate.rbf_model import SurrogateState, predict_summary
from barbf.testbed.grid import CandidateGrid, explored_mask, make_grid
from barbf.testbed.problems import TestProblem, get_problem

logger = logging.getLogger(__name__)

_SEED_BITS = 2**63 - 1


class _Streams:
    """Independent random streams of one run, all spawned from the master seed."""

    def __init__(self, seed: Optional[int]):
        root = np.random.SeedSequence(seed)
        self.entropy = int(root.entropy)
        design, run = root.spawn(2)
        select, candidates, fits = run.spawn(3)
        self.design = design
        self.select = np.random.default_rng(select)
        self.candidates = np.random.default_rng(candidates)
        self.fits = np.random.default_rng(fits)

    def fit_seed(self) -> int:
        return int(self.fits.integers(_SEED_BITS))


def initial_design(cfg: RunConfig, problem: TestProblem, grid: Optional[CandidateGrid], seed) -> np.ndarray:
    """Maximin LHD of ``n_min`` points scaled to the region, snapped to the grid when one is used."""
    points = maximin_lhd(cfg.n_min, problem.dim, seed=seed, restarts=cfg.lhd_restarts).scaled(problem.region)
    return snap_to_grid(points, grid) if grid is not None else points


def _extend_state(state: SurrogateState, new_points: np.ndarray, shared_scale: bool) -> SurrogateState:
    """Append one basis per new point: zero coefficient, slab indicator, current scale."""
    k = new_points.shape[0]
    fill = state.scales[0] if shared_scale else float(state.scales.mean())
    return SurrogateState(
        beta=np.concatenate([state.beta, np.zeros(k)]),
        gamma=np.concatenate([state.gamma, np.ones(k, dtype=state.gamma.dtype)]),
        sigma2=state.sigma2,
        centers=np.vstack([state.centers, new_points]),
        scales=np.concatenate([state.scales, np.full(k, fill)]),
    )


class _Evaluator:
    """Calls the objective, appends to the trace and guards against repeats."""

    def __init__(self, problem: TestProblem, trace: RunTrace):
        self.problem = problem
        self.trace = trace
        self.calls = 0

    def __call__(self, x: np.ndarray, phase: str, meta: Optional[dict] = None) -> float:
        if len(self.trace) and explored_mask(np.atleast_2d(x), self.trace.X)[0]:
            raise DuplicatePointError(f"point {x.tolist()} has already been evaluated")
        self.calls += 1
        try:
            y = float(self.problem(x))
        except Exception as exc:
            raise ObjectiveEvaluationError(
                f"objective '{self.problem.name}' failed at {x.tolist()}: {exc}", self.trace, point=x
            ) from exc
        if not np.isfinite(y):
            raise ObjectiveEvaluationError(
                f"objective '{self.problem.name}' returned {y} at {x.tolist()}", self.trace, point=x
            )
        self.trace.append(x, y, phase=phase, meta=meta)
        return y


class _BayesianSearch:
    """Chain fit plus SEI selection, with optional warm start and diagnostics."""

    def __init__(self, cfg: RunConfig, problem: TestProblem, streams: _Streams, initial_scale: float):
        self.cfg = cfg
        self.problem = problem
        self.streams = streams
        self.initial_scale = initial_scale
        self.last_state: Optional[SurrogateState] = None
        self.diagnostics: list[pd.DataFrame] = []
        self.final_scores: Optional[pd.DataFrame] = None

    def select(self, X: np.ndarray, y: np.ndarray, candidates: np.ndarray, iteration: int) -> Selection:
        cfg = self.cfg
        hp = default_hyperparams(X, y, C=cfg.resolved_c(self.problem))
        if cfg.hyper_overrides:
            hp = hp.with_overrides(**{k: float(v) for k, v in cfg.hyper_overrides.items()})
        chain_cfg = replace(cfg.chain, seed=self.streams.fit_seed(), record_diagnostics=cfg.record_diagnostics)

        start = None
        if cfg.warm_start and self.last_state is not None:
            start = _extend_state(
                self.last_state, X[self.last_state.n_bases:], cfg.chain.update_s_mode == SHARED_S
            )
        ensemble = run_chain(X, y, hp, chain_cfg, initial_scale=self.initial_scale, start=start)
        self.last_state = ensemble.states[-1]

        ctx = AcquisitionContext(candidates, X, y)
        sel = select_next(ctx, ensemble, self.streams.select)
        summary = predict_summary(sel.point, ensemble)
        diag = ensemble.diagnostics
        meta = dict(sel.meta)
        meta.update(
            post_mean=summary.mean,
            post_var=summary.variance,
            cib=summary.cib,
            accept_s=diag.accept_s if diag is not None else None,
            accept_mu=diag.accept_mu if diag is not None else None,
        )
        if cfg.record_diagnostics and diag is not None:
            frame = diag.to_frame()
            frame.insert(0, "iteration", iteration)
            self.diagnostics.append(frame)
            if len(X) + 1 == cfg.n_max:
                self.final_scores = acquisition_scores(ctx, ensemble)
        return replace(sel, meta=meta)


def run_optimization(cfg: RunConfig) -> RunTrace:
    """Run one optimization and return its full trace of ``n_max`` evaluations.

    Raises
    ------
    ValueError
        Invalid configuration.
    ObjectiveEvaluationError
        The objective failed; the exception carries the partial trace.
    """
    issues = validate_run_config(cfg)
    if issues:
        raise ValueError("Invalid run configuration: " + "; ".join(issues))

    problem = get_problem(cfg.problem)
    streams = _Streams(cfg.seed)
    mode = cfg.resolved_candidate_mode(problem)
    grid = make_grid(problem.region, cfg.resolved_grid_step(problem)) if mode == GRID else None
    trace = RunTrace(problem=problem.name, method=cfg.method, seed=streams.entropy, n_min=cfg.n_min)
    evaluate = _Evaluator(problem, trace)
    started = time.time()

    logger.info(
        "Run start: %s on %s, N_min=%d N_max=%d, %s candidates%s, seed=%d",
        cfg.method, problem.name, cfg.n_min, cfg.n_max, mode,
        f" ({grid.size} grid points)" if grid is not None else f" ({cfg.n_candidates} per iteration)",
        streams.entropy,
    )

    design = initial_design(cfg, problem, grid, streams.design)
    trace.artifacts["design"] = design
    for x in design:
        evaluate(x, phase="initial")

    X0, y0 = trace.X, trace.y
    bayes: Optional[_BayesianSearch] = None
    if cfg.method in BAYESIAN_METHODS:
        bayes = _BayesianSearch(cfg, problem, streams, choose_scale_loo(X0, y0, cfg.loo_scales))
    cycle = WeightCycle() if cfg.method == GMSRBF else None
    escape = EscapeState(M_I=cfg.escape_m_i, M_T=cfg.escape_m_t) if cfg.method == M_BARBF else None

    iteration = 0
    while len(trace) < cfg.n_max:
        iteration += 1
        X, y = trace.X, trace.y
        f_max = float(y.max())
        if grid is not None:
            candidates = grid.points
        else:
            candidates = sample_candidates_uniform(problem.region, cfg.n_candidates, streams.candidates)

        phase = "search"
        if escape is not None and escape.in_escape and escape.added_this_episode < escape.M_T:
            point = maximin_distance_point(candidates[~explored_mask(candidates, X)], X)
            escape = record_escape_point(escape)
            sel = Selection(point=point, score=float("nan"), meta={"escape_count": escape.added_this_episode})
            phase = "escape"
        elif bayes is not None:
            sel = bayes.select(X, y, candidates, iteration)
        elif cfg.method == GMSRBF:
            scale = choose_scale_loo(X, y, cfg.loo_scales)
            sel = gmsrbf_select(candidates, gmsrbf_fit(X, y, scale), X, cycle)
            sel = replace(sel, meta={**sel.meta, "scale": scale})
        elif cfg.method == EGO:
            gp = ego_fit(X, y, n_starts=cfg.ego_starts, seed=streams.fit_seed())
            sel = ego_select(candidates, gp, X, f_max)
            sel = replace(sel, meta={**sel.meta, "length_scales": gp.length_scales.tolist()})
        else:  # pragma: no cover - rejected by validation
            raise ValueError(f"unknown method '{cfg.method}'")

        y_new = evaluate(sel.point, phase=phase, meta=sel.meta)
        improved = y_new > f_max
        if escape is not None:
            escape = update_escape(escape, improved)

        accept = sel.meta.get("accept_s")
        logger.info(
            "Iter %d (%s): x=%s y=%.6g best=%.6g%s",
            iteration, phase, np.round(sel.point, 4).tolist(), y_new, trace.records[-1].best,
            f" accept_s={accept:.3f}" if accept is not None else "",
        )

    if evaluate.calls != cfg.n_max:  # pragma: no cover - loop invariant
        raise RuntimeError(f"budget mismatch: {evaluate.calls} objective calls for N_max={cfg.n_max}")

    if bayes is not None and bayes.diagnostics:
        trace.artifacts["chain_diagnostics"] = pd.concat(bayes.diagnostics, ignore_index=True)
    if bayes is not None and bayes.final_scores is not None:
        trace.artifacts["acquisition_scores"] = bayes.final_scores

    logger.info(
        "Run done: %s on %s, best %.6g after %d evaluations (%.1fs)",
        cfg.method, problem.name, trace.records[-1].best, len(trace), time.time() - started,
    )
    return trace
