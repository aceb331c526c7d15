"""The sequential search loop and its evaluation trace."""

from barbf.optimizer.loop import initial_design, run_optimization
from barbf.optimizer.trace import EvaluationRecord, RunTrace, incumbent, read_trace, write_trace

__all__ = ["EvaluationRecord", "RunTrace", "incumbent", "initial_design", "read_trace", "run_optimization", "write_trace"]
