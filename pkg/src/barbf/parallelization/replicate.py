"""
Replication runner.

Runs the same configuration many times with independent seeds, either in
process or on a ``ProcessPoolExecutor``, and aggregates the final best values
and best-so-far curves. Results are sorted by replication index before
aggregation, so the worker count never changes the output.

Usage:
    runner = ReplicationRunner(jobs=4)
    result = runner.run(cfg, reps=20, base_seed=2024)
    print(result.summary.table_row())

Requirements:
    - psutil (optional, memory reporting)
"""
from __future__ import annotations

import hashlib
import logging
import time
import traceback
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field, replace
from multiprocessing import cpu_count
from typing import Any, Callable, Optional

from barbf.config.run_config import GRID, RunConfig
from barbf.config.schema import RunConfigSchema
from barbf.optimizer.loop import run_optimization
from barbf.optimizer.trace import RunTrace, incumbent
from barbf.results.summary import HIT_TOL, QuantileCurves, ReplicationSummary, quantile_curves, summarize_bests
from barbf.testbed.problems import get_problem, grid_optimum

logger = logging.getLogger(__name__)

try:
    import psutil
    PSUTIL_AVAILABLE = True
except ImportError:
    PSUTIL_AVAILABLE = False


def replication_seed(base_seed: int, index: int) -> int:
    """64-bit seed of replication ``index``: the leading bytes of ``sha256("base_seed:index")``."""
    digest = hashlib.sha256(f"{base_seed}:{index}".encode("ascii")).digest()
    return int.from_bytes(digest[:8], "big")


def _worker_init():
    """Import the numerical stack once per worker process."""
    import numpy  # noqa: F401
    import scipy.linalg  # noqa: F401
    import scipy.stats  # noqa: F401


def run_replication(cfg: RunConfig, index: int, seed: int) -> dict[str, Any]:
    """
    Run one replication and report the outcome as a plain dict.

    Failures are caught and reported with ``success = False`` so one bad
    replication never takes the pool down.

    Returns
    -------
    dict
        ``index``, ``seed``, ``success``, ``processing_time`` and either
        ``best``, ``x_best``, ``trace`` or ``error`` and ``traceback``.
    """
    start_time = time.time()
    try:
        trace = run_optimization(replace(cfg, seed=seed))
        x_best, best = incumbent(trace)
        trace.artifacts.clear()
        return {
            "index": index,
            "seed": seed,
            "success": True,
            "best": best,
            "x_best": x_best.tolist(),
            "trace": trace,
            "processing_time": time.time() - start_time,
        }
    except Exception as exc:
        return {
            "index": index,
            "seed": seed,
            "success": False,
            "error": f"{type(exc).__name__}: {exc}",
            "traceback": traceback.format_exc(),
            "processing_time": time.time() - start_time,
        }


@dataclass
class ReplicationResult:
    summary: ReplicationSummary
    curves: QuantileCurves
    traces: dict[int, RunTrace] = field(default_factory=dict)
    failures: list[dict[str, Any]] = field(default_factory=list)
    elapsed_s: float = 0.0

    @property
    def any_failed(self) -> bool:
        return bool(self.failures)


class ReplicationRunner:
    """
    Runs replications of one configuration, optionally in parallel.

    Attributes
    ----------
    jobs : int
        Worker processes; 1 runs everything in the calling process.
    progress_callback : Callable
        Optional callback called with ``(completed, total)``.
    """

    def __init__(self, jobs: Optional[int] = 1, progress_callback: Optional[Callable[[int, int], None]] = None):
        self.jobs = jobs if jobs is not None else max(1, min(16, cpu_count() - 1))
        if self.jobs < 1:
            raise ValueError(f"jobs must be >= 1, got {self.jobs}")
        self.progress_callback = progress_callback

    def _collect(self, cfg: RunConfig, seeds: list[int]) -> list[dict[str, Any]]:
        total = len(seeds)
        results: list[dict[str, Any]] = []

        def _done(result: dict[str, Any]) -> None:
            results.append(result)
            if result["success"]:
                logger.info(
                    "Replication %d done: best %.6g (%.1fs)",
                    result["index"], result["best"], result["processing_time"],
                )
            else:
                logger.error("Replication %d failed: %s\n%s", result["index"], result["error"], result["traceback"])
            if self.progress_callback:
                self.progress_callback(len(results), total)

        if self.jobs == 1 or total == 1:
            for i, seed in enumerate(seeds):
                _done(run_replication(cfg, i, seed))
            return results

        with ProcessPoolExecutor(max_workers=min(self.jobs, total), initializer=_worker_init) as executor:
            futures = {executor.submit(run_replication, cfg, i, seed): i for i, seed in enumerate(seeds)}
            for future in as_completed(futures):
                try:
                    _done(future.result())
                except Exception as exc:
                    i = futures[future]
                    _done({
                        "index": i,
                        "seed": seeds[i],
                        "success": False,
                        "error": f"worker crashed: {exc}",
                        "traceback": traceback.format_exc(),
                        "processing_time": 0.0,
                    })
        return results

    def run(self, cfg: RunConfig, reps: int, base_seed: int = 0) -> ReplicationResult:
        """Run ``reps`` replications and aggregate the successful ones."""
        if reps < 1:
            raise ValueError(f"reps must be >= 1, got {reps}")
        start_time = time.time()
        seeds = [replication_seed(base_seed, i) for i in range(reps)]
        logger.info(
            "Replicating %s on %s: %d reps, base seed %d, %d worker(s)",
            cfg.method, cfg.problem, reps, base_seed, min(self.jobs, reps),
        )
        if PSUTIL_AVAILABLE:
            logger.info("System memory available: %.1f GB", psutil.virtual_memory().available / 1024**3)

        results = sorted(self._collect(cfg, seeds), key=lambda r: r["index"])
        ok = [r for r in results if r["success"]]
        failures = [{k: v for k, v in r.items() if k != "trace"} for r in results if not r["success"]]
        if not ok:
            raise RuntimeError(f"all {reps} replications failed; first error: {failures[0]['error']}")

        problem = get_problem(cfg.problem)
        optimum = None
        if cfg.resolved_candidate_mode(problem) == GRID:
            optimum = grid_optimum(problem.name, float(cfg.resolved_grid_step(problem)))

        summary = summarize_bests(
            [r["best"] for r in ok],
            problem=problem.name,
            method=cfg.method,
            grid_optimum=optimum,
            hit_tol=HIT_TOL,
            n_failed=len(failures),
            base_seed=base_seed,
            config=RunConfigSchema().dump(cfg),
        )
        curves = quantile_curves([r["trace"].search_curve() for r in ok])
        elapsed = time.time() - start_time
        logger.info(
            "Replications finished: %d ok, %d failed, mean best %.6g%s (%.1fs)",
            len(ok), len(failures), summary.mean,
            f", hits {summary.hits}/{summary.n_success}" if summary.hits is not None else "",
            elapsed,
        )
        if PSUTIL_AVAILABLE:
            logger.info("Process memory: %.1f MB", psutil.Process().memory_info().rss / 1024**2)
        return ReplicationResult(
            summary=summary,
            curves=curves,
            traces={r["index"]: r["trace"] for r in ok},
            failures=failures,
            elapsed_s=elapsed,
        )


def replicate(cfg: RunConfig, reps: int, base_seed: int = 0, jobs: Optional[int] = 1) -> ReplicationResult:
    """Run ``reps`` independent replications of ``cfg``; see :class:`ReplicationRunner`."""
    return ReplicationRunner(jobs=jobs).run(cfg, reps, base_seed)
