"""Replication summaries and file export."""

from barbf.results.export import export_failures, export_results, export_run, export_traces, load_summary
from barbf.results.summary import QuantileCurves, ReplicationSummary, quantile_curves, summarize_bests

__all__ = [
    "QuantileCurves",
    "ReplicationSummary",
    "export_failures",
    "export_results",
    "export_run",
    "export_traces",
    "load_summary",
    "quantile_curves",
    "summarize_bests",
]
