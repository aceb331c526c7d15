import time
import logging
from pathlib import Path
from typing import Any, Optional, Union

from barbf.config.run_config import RunConfig
from barbf.config.validator import validate_run_config
from barbf.errors import ObjectiveEvaluationError
from barbf.optimizer.loop import run_optimization
from barbf.optimizer.trace import incumbent
from barbf.results.export import export_run

logger = logging.getLogger(__name__)


def run_single(cfg: RunConfig, out: Optional[Union[str, Path]] = None) -> dict[str, Any]:
    """
    Run one optimization and return its trace with the incumbent.

    Parameters
    ----------
    cfg : RunConfig
        Problem, method, budget and sampler settings.
    out : path, optional
        Directory for the trace, the initial design and, when
        ``cfg.record_diagnostics`` is set, the chain diagnostics and final
        acquisition scores.

    Returns
    -------
    dict
        ``trace``, ``x_best``, ``best``, ``elapsed_s`` and ``files`` (written paths).

    Raises
    ------
    ValueError
        The configuration failed validation.
    ObjectiveEvaluationError
        The objective failed; ``exc.trace`` holds the evaluations made so far.
    RuntimeError
        Any other failure during the run.
    """
    start_time = time.time()

    if cfg is None:
        raise ValueError("cfg must be provided to run_single")

    issues = validate_run_config(cfg)
    if issues:
        raise ValueError("Configuration validation failed: " + "; ".join(issues))

    try:
        trace = run_optimization(cfg)
        x_best, best = incumbent(trace)
        files = []
        if out is not None:
            files = export_run(trace, out)
        return {
            "trace": trace,
            "x_best": x_best,
            "best": best,
            "elapsed_s": time.time() - start_time,
            "files": files,
        }
    except ObjectiveEvaluationError:
        raise
    except Exception as exc:
        raise RuntimeError(f"Optimization run failed: {exc}") from exc
