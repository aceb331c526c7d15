#!/usr/bin/env python3
"""Run-level invariants of the optimization loop and the trace format."""
from dataclasses import replace
from functools import partial

import numpy as np
import pytest

from barbf.errors import ObjectiveEvaluationError
from barbf.main import run_single
from barbf.optimizer.loop import run_optimization
from barbf.optimizer.trace import EvaluationRecord, RunTrace, incumbent, read_trace, write_trace
from barbf.testbed.grid import Box, make_grid
from barbf.testbed.problems import TestProblem


def _check_invariants(trace, cfg, grid=None):
    assert len(trace) == cfg.n_max
    best = trace.best_so_far
    assert np.all(np.diff(best) >= 0)
    np.testing.assert_array_equal(best, np.maximum.accumulate(trace.y))
    assert len({tuple(x) for x in trace.X}) == cfg.n_max
    assert [r.phase for r in trace.records[: cfg.n_min]] == ["initial"] * cfg.n_min
    assert all(r.phase != "initial" for r in trace.records[cfg.n_min :])
    if grid is not None:
        assert all(grid.contains(x) for x in trace.X)


# ── trace ────────────────────────────────────────────────────────────────────
def test_trace_bookkeeping(tmp_path):
    trace = RunTrace(problem="branin", method="barbf", n_min=2)
    trace.append([0.1, 0.2], 1.0, phase="initial")
    trace.append([0.3, 0.4], 3.0, phase="initial")
    trace.append([0.5, 0.6], 2.0, meta={"sei": np.float64(0.25)})
    trace.append([0.7, 0.8], 3.0, phase="escape")
    assert trace.best_so_far.tolist() == [1.0, 3.0, 3.0, 3.0]
    assert trace.search_curve().tolist() == [3.0, 3.0]
    x_best, y_best = incumbent(trace)
    assert x_best.tolist() == [0.3, 0.4] and y_best == 3.0
    frame = trace.to_frame()
    assert list(frame.columns) == ["index", "x1", "x2", "y", "best", "phase"]

    path = write_trace(trace, tmp_path / "trace.jsonl")
    back = read_trace(path, problem="branin", method="barbf", n_min=2)
    assert [r.to_dict() for r in back.records] == [r.to_dict() for r in trace.records]
    assert back.records[2].meta == {"sei": 0.25}


def test_trace_rejects_bad_records(tmp_path):
    with pytest.raises(ValueError):
        EvaluationRecord(index=0, x=(0.0,), y=1.0, best=1.0, phase="warmup")
    with pytest.raises(ValueError):
        EvaluationRecord(index=0, x=(0.0,), y=1.0, best=0.5)
    with pytest.raises(ValueError):
        incumbent(RunTrace())
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"x": [0.1], "y": 1.0}\n{"y": 2.0}\n', encoding="utf-8")
    with pytest.raises(ValueError, match="bad.jsonl:2"):
        read_trace(bad)


# ── loop ─────────────────────────────────────────────────────────────────────
@pytest.mark.parametrize("method", ["barbf", "m-barbf", "gmsrbf", "ego"])
def test_run_invariants_on_grid(tiny_run, method):
    cfg = replace(tiny_run, method=method)
    trace = run_optimization(cfg)
    _check_invariants(trace, cfg, make_grid(Box.unit(2), 0.04))
    assert trace.method == method and trace.problem == "branin"


def test_run_is_deterministic(tiny_run):
    a = run_optimization(tiny_run)
    b = run_optimization(tiny_run)
    np.testing.assert_array_equal(a.X, b.X)
    np.testing.assert_array_equal(a.y, b.y)
    assert a.seed == b.seed == 11


def test_initial_design_does_not_depend_on_method(tiny_run):
    designs = [run_optimization(replace(tiny_run, method=m)).X[: tiny_run.n_min] for m in ("barbf", "gmsrbf", "ego")]
    np.testing.assert_array_equal(designs[0], designs[1])
    np.testing.assert_array_equal(designs[0], designs[2])


def test_search_metadata(tiny_run):
    trace = run_optimization(tiny_run)
    meta = trace.records[-1].meta
    assert {"sei", "post_mean", "post_var", "cib", "accept_s", "accept_mu"} <= set(meta)
    assert meta["accept_mu"] is None
    assert 0.0 <= meta["accept_s"] <= 1.0

    g = run_optimization(replace(tiny_run, method="gmsrbf"))
    assert [r.meta["weight"] for r in g.records[g.n_min :]] == [1.0, 0.8, 0.6, 0.4]


def test_gridfree_run_uses_sampled_candidates(short_chain):
    from barbf.config.run_config import RunConfig

    cfg = RunConfig(
        problem="rastrigin:3",
        method="barbf-gridfree",
        n_min=8,
        n_max=11,
        n_candidates=300,
        chain=short_chain,
        lhd_restarts=2,
        seed=5,
    )
    trace = run_optimization(cfg)
    _check_invariants(trace, cfg)
    assert np.all((trace.X >= 0.0) & (trace.X <= 1.0))
    g = run_optimization(replace(cfg, method="gmsrbf", candidate_mode="uniform"))
    _check_invariants(g, cfg)


def test_diagnostics_and_warm_start(tiny_run):
    cfg = replace(tiny_run, record_diagnostics=True, warm_start=True)
    trace = run_optimization(cfg)
    _check_invariants(trace, cfg)
    diag = trace.artifacts["chain_diagnostics"]
    assert sorted(diag["iteration"].unique().tolist()) == [1, 2, 3, 4]
    assert len(diag) == 4 * cfg.chain.n_iter
    scores = trace.artifacts["acquisition_scores"]
    assert len(scores) == make_grid(Box.unit(2), 0.04).size - (cfg.n_max - 1)
    assert trace.artifacts["design"].shape == (cfg.n_min, 2)


def test_invalid_config_rejected(tiny_run):
    with pytest.raises(ValueError, match="n_max"):
        run_optimization(replace(tiny_run, n_max=tiny_run.n_min))
    with pytest.raises(ValueError, match="Configuration validation failed"):
        run_single(replace(tiny_run, method="simplex"))


# ── escape behaviour on a synthetic plateau ──────────────────────────────────
def _plateau(x, state, n_min, improve_at=None):
    """Varied values on the initial design, then a flat -10 except one jump to 100."""
    k = state["calls"]
    state["calls"] += 1
    if k < n_min:
        return float(np.sin(7.0 * np.asarray(x)).sum())
    return 100.0 if improve_at is not None and k - n_min == improve_at else -10.0


def _patch_problem(monkeypatch, objective):
    problem = TestProblem(name="branin", dim=2, region=Box.unit(2), objective=objective, grid_step=0.04)
    monkeypatch.setattr("barbf.optimizer.loop.get_problem", lambda name: problem)


def test_escape_on_plateau(monkeypatch, tiny_run):
    """Three non-improving searches trigger three maximin points, then search resumes."""
    cfg = replace(tiny_run, method="m-barbf", n_max=tiny_run.n_min + 12)
    _patch_problem(monkeypatch, partial(_plateau, state={"calls": 0}, n_min=cfg.n_min))
    trace = run_optimization(cfg)
    phases = [r.phase for r in trace.records[cfg.n_min :]]
    assert phases == (["search"] * 3 + ["escape"] * 3) * 2
    assert [r.meta["escape_count"] for r in trace.records if r.phase == "escape"] == [1, 2, 3, 1, 2, 3]
    _check_invariants(trace, cfg)


def test_escape_resets_on_improvement(monkeypatch, tiny_run):
    cfg = replace(tiny_run, method="m-barbf", n_max=tiny_run.n_min + 11)
    _patch_problem(monkeypatch, partial(_plateau, state={"calls": 0}, n_min=cfg.n_min, improve_at=4))
    trace = run_optimization(cfg)
    phases = [r.phase for r in trace.records[cfg.n_min :]]
    assert phases == ["search"] * 3 + ["escape"] * 2 + ["search"] * 3 + ["escape"] * 3
    assert trace.records[cfg.n_min + 4].y == 100.0


def test_escape_point_is_farthest_feasible(monkeypatch, tiny_run):
    cfg = replace(tiny_run, method="m-barbf", n_max=tiny_run.n_min + 4)
    _patch_problem(monkeypatch, partial(_plateau, state={"calls": 0}, n_min=cfg.n_min))
    trace = run_optimization(cfg)
    grid = make_grid(Box.unit(2), 0.04)
    before = trace.X[: cfg.n_min + 3]
    dist = np.min(np.linalg.norm(grid.points[:, None, :] - before[None, :, :], axis=2), axis=1)
    assert np.min(np.linalg.norm(before - trace.X[-1], axis=1)) == pytest.approx(dist.max())


def test_objective_failure_keeps_partial_trace(monkeypatch, tiny_run):
    state = {"calls": 0}

    def flaky(x):
        state["calls"] += 1
        if state["calls"] > 7:
            raise RuntimeError("simulator crashed")
        return float(np.sum(x))

    _patch_problem(monkeypatch, flaky)
    with pytest.raises(ObjectiveEvaluationError) as info:
        run_single(tiny_run)
    assert len(info.value.trace) == 7
    assert info.value.point is not None


def test_non_finite_objective_is_an_error(monkeypatch, tiny_run):
    _patch_problem(monkeypatch, lambda x: float("nan"))
    with pytest.raises(ObjectiveEvaluationError):
        run_optimization(tiny_run)


def test_run_single_writes_files(tmp_path, tiny_run):
    res = run_single(replace(tiny_run, record_diagnostics=True), out=tmp_path / "run")
    assert set(res) == {"trace", "x_best", "best", "elapsed_s", "files"}
    assert res["best"] == res["trace"].best_so_far[-1]
    names = {p.name for p in res["files"]}
    assert names == {"trace.jsonl", "design.csv", "chain_diagnostics.csv", "acquisition_scores.csv"}
    assert len((tmp_path / "run" / "trace.jsonl").read_text().splitlines()) == tiny_run.n_max


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
