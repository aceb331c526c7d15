"""File output for runs and replication studies.

Layout of a replication directory::

    summary.json          ReplicationSummary as JSON
    curves.csv            iteration, mean, q05, q95
    failures.json         failed replications with error text (only when any failed)
    traces/rep_0000.jsonl one trace per successful replication

Floats are written with enough digits to round-trip, so identical inputs give
byte-identical files.
"""
from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Mapping, Sequence, Union

import pandas as pd

from barbf.design.lhd import export_design
from barbf.optimizer.trace import RunTrace, write_trace
from barbf.results.summary import QuantileCurves, ReplicationSummary

logger = logging.getLogger(__name__)

SUMMARY_FILE = "summary.json"
CURVES_FILE = "curves.csv"
FAILURES_FILE = "failures.json"
TRACES_DIR = "traces"
FLOAT_FORMAT = "%.12g"

PathLike = Union[str, Path]


def _write_text(path: Path, text: str) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"could not write {path}: {exc}") from exc
    return path


def _write_frame(frame: pd.DataFrame, path: Path) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    except OSError as exc:
        raise OSError(f"could not write {path}: {exc}") from exc
    return path


def export_results(summary: ReplicationSummary, curves: QuantileCurves, path: PathLike) -> list[Path]:
    """Write ``summary.json`` and ``curves.csv`` into the directory ``path``."""
    out = Path(path)
    files = [
        _write_text(out / SUMMARY_FILE, json.dumps(summary.to_dict(), indent=2, sort_keys=True) + "\n"),
        _write_frame(curves.to_frame(), out / CURVES_FILE),
    ]
    logger.info("Wrote summary and %d-row curves to %s", len(curves), out)
    return files


def load_summary(path: PathLike) -> ReplicationSummary:
    """Read a summary written by :func:`export_results` (file or its directory)."""
    path = Path(path)
    if path.is_dir():
        path = path / SUMMARY_FILE
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise OSError(f"could not read summary {path}: {exc}") from exc
    return ReplicationSummary.from_dict(raw)


def load_curves(path: PathLike) -> pd.DataFrame:
    path = Path(path)
    if path.is_dir():
        path = path / CURVES_FILE
    return pd.read_csv(path)


def export_traces(traces: Mapping[int, RunTrace], path: PathLike) -> list[Path]:
    """Write ``traces/rep_XXXX.jsonl`` for each replication index."""
    out = Path(path) / TRACES_DIR
    return [write_trace(traces[i], out / f"rep_{i:04d}.jsonl") for i in sorted(traces)]


def export_failures(failures: Sequence[Mapping[str, Any]], path: PathLike) -> Path:
    records = [
        {"index": f["index"], "seed": f.get("seed"), "error": f.get("error"), "traceback": f.get("traceback")}
        for f in sorted(failures, key=lambda f: f["index"])
    ]
    return _write_text(Path(path) / FAILURES_FILE, json.dumps(records, indent=2) + "\n")


def export_run(trace: RunTrace, path: PathLike) -> list[Path]:
    """Write one run: ``trace.jsonl``, ``design.csv`` and any recorded diagnostics."""
    out = Path(path)
    files = [write_trace(trace, out / "trace.jsonl")]
    design = trace.artifacts.get("design")
    if design is not None:
        files.append(export_design(design, out / "design.csv"))
    diagnostics = trace.artifacts.get("chain_diagnostics")
    if diagnostics is not None:
        files.append(_write_frame(diagnostics, out / "chain_diagnostics.csv"))
    scores = trace.artifacts.get("acquisition_scores")
    if scores is not None:
        files.append(_write_frame(scores, out / "acquisition_scores.csv"))
    logger.info("Wrote %d run file(s) to %s", len(files), out)
    return files
