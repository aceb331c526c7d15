"""Replication aggregates, result files and the replication runner."""
from dataclasses import replace

import numpy as np
import pandas as pd
import pytest

from barbf.optimizer.trace import read_trace
from barbf.parallelization.replicate import ReplicationRunner, replicate, replication_seed, run_replication
from barbf.results.export import (
    export_failures,
    export_results,
    export_traces,
    load_curves,
    load_summary,
)
from barbf.results.summary import QuantileCurves, quantile_curves, summarize_bests
from barbf.testbed.problems import grid_optimum


def test_summary_statistics():
    values = [1.0, 2.0, 3.0, 4.0, 5.0]
    s = summarize_bests(values, problem="branin", method="barbf", grid_optimum=5.00005)
    assert (s.q05, s.q1, s.median, s.q3, s.q95) == pytest.approx((1.2, 2.0, 3.0, 4.0, 4.8))
    assert s.mean == 3.0
    assert s.std == pytest.approx(np.std(values, ddof=1))
    assert s.hits == 1
    assert s.n_success == 5
    row = s.table_row()
    assert row["hits"] == "1/5" and row.name == "branin/barbf"


def test_summary_edge_cases():
    one = summarize_bests([2.5])
    assert one.std == 0.0 and one.q05 == one.q95 == 2.5
    assert one.hits is None and one.table_row()["hits"] == "-"
    with pytest.raises(ValueError):
        summarize_bests([])


def test_quantile_curves():
    curves = [np.array([0.0, 1.0, 1.0]), np.array([0.5, 0.5, 2.0]), np.array([1.0, 1.0, 3.0])]
    qc = quantile_curves(curves)
    assert qc.iteration.tolist() == [1, 2, 3]
    np.testing.assert_allclose(qc.mean, [0.5, 2.5 / 3, 2.0])
    np.testing.assert_allclose(qc.q05, [0.05, 0.55, 1.1])
    assert len(quantile_curves([])) == 0


def test_export_round_trip(tmp_path):
    s = summarize_bests([1.0, 1.04], problem="branin", method="ego", grid_optimum=1.04, config={"n_max": 46})
    qc = quantile_curves([np.array([0.5, 1.0]), np.array([0.7, 1.04])])
    files = export_results(s, qc, tmp_path)
    assert [p.name for p in files] == ["summary.json", "curves.csv"]
    assert load_summary(tmp_path) == s
    frame = load_curves(tmp_path)
    assert list(frame.columns) == ["iteration", "mean", "q05", "q95"]
    np.testing.assert_allclose(frame["mean"], qc.mean)


def test_empty_curves_file_has_header(tmp_path):
    export_results(summarize_bests([1.0]), QuantileCurves.empty(), tmp_path)
    text = (tmp_path / "curves.csv").read_text()
    assert text == "iteration,mean,q05,q95\n"


def test_export_failures(tmp_path):
    path = export_failures([{"index": 3, "seed": 9, "error": "boom", "traceback": "tb"}], tmp_path)
    assert "boom" in path.read_text()


def test_replication_seeds_are_stable():
    assert replication_seed(2024, 0) == replication_seed(2024, 0)
    seeds = {replication_seed(2024, i) for i in range(50)}
    assert len(seeds) == 50
    assert all(0 <= s < 2**64 for s in seeds)
    assert replication_seed(2024, 1) != replication_seed(2025, 1)


def test_replicate_in_process(tiny_run, tmp_path):
    result = replicate(tiny_run, reps=3, base_seed=7)
    s = result.summary
    assert s.n_success == 3 and s.n_failed == 0
    assert s.grid_optimum == pytest.approx(grid_optimum("branin", 0.04))
    assert s.hits is not None
    assert s.config["method"] == "barbf" and s.base_seed == 7
    assert len(result.curves) == tiny_run.n_max - tiny_run.n_min
    assert sorted(result.traces) == [0, 1, 2]
    assert result.traces[1].seed == replication_seed(7, 1)
    best = [result.traces[i].best_so_far[-1] for i in range(3)]
    assert list(s.best_values) == best

    written = export_traces(result.traces, tmp_path)
    assert [p.name for p in written] == ["rep_0000.jsonl", "rep_0001.jsonl", "rep_0002.jsonl"]
    back = read_trace(written[2])
    np.testing.assert_array_equal(back.y, result.traces[2].y)


def test_replicate_parallel_matches_serial(tiny_run):
    cfg = replace(tiny_run, method="gmsrbf")
    serial = replicate(cfg, reps=3, base_seed=1, jobs=1)
    parallel = replicate(cfg, reps=3, base_seed=1, jobs=2)
    assert serial.summary.best_values == parallel.summary.best_values
    np.testing.assert_array_equal(serial.curves.mean, parallel.curves.mean)


def test_failed_replications_are_reported(tiny_run):
    bad = run_replication(replace(tiny_run, n_max=3), 0, 1)
    assert bad["success"] is False and "n_max" in bad["error"]
    with pytest.raises(RuntimeError, match="all 2 replications failed"):
        ReplicationRunner(jobs=1).run(replace(tiny_run, n_max=3), reps=2)
    with pytest.raises(ValueError):
        ReplicationRunner(jobs=0)
