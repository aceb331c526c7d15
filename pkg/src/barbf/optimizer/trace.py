"""Evaluation history of one optimization run and its JSON-lines format.

Each line of a trace file is one evaluation::

    {"index": 0, "x": [0.12, 0.88], "y": -3.1, "best": -3.1, "phase": "initial", "meta": {}}

``phase`` is ``initial`` for the starting design, ``search`` for points
chosen by the acquisition rule and ``escape`` for space-filling points.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

PHASES = ("initial", "search", "escape")


def _to_builtin(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"cannot serialise {type(value).__name__} in a trace record")


@dataclass(frozen=True)
class EvaluationRecord:
    index: int
    x: tuple[float, ...]
    y: float
    best: float
    phase: str = "search"
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.phase not in PHASES:
            raise ValueError(f"unknown phase '{self.phase}'; expected one of {PHASES}")
        if self.best < self.y:
            raise ValueError(f"best-so-far {self.best} below the response {self.y} of record {self.index}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "index": self.index,
            "x": list(self.x),
            "y": self.y,
            "best": self.best,
            "phase": self.phase,
            "meta": self.meta,
        }


@dataclass
class RunTrace:
    """Explored points in evaluation order with the best-so-far curve.

    ``artifacts`` holds in-memory extras (chain diagnostics, acquisition
    scores) that are exported separately and never written to the trace file.
    """

    problem: str = ""
    method: str = ""
    seed: Optional[int] = None
    n_min: int = 0
    records: list[EvaluationRecord] = field(default_factory=list)
    artifacts: dict[str, Any] = field(default_factory=dict, repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.records)

    def append(self, x, y: float, phase: str = "search", meta: Optional[dict[str, Any]] = None) -> EvaluationRecord:
        y = float(y)
        best = y if not self.records else max(self.records[-1].best, y)
        record = EvaluationRecord(
            index=len(self.records),
            x=tuple(float(v) for v in np.ravel(x)),
            y=y,
            best=best,
            phase=phase,
            meta=dict(meta or {}),
        )
        self.records.append(record)
        return record

    @property
    def X(self) -> np.ndarray:
        return np.array([r.x for r in self.records], dtype=float)

    @property
    def y(self) -> np.ndarray:
        return np.array([r.y for r in self.records], dtype=float)

    @property
    def best_so_far(self) -> np.ndarray:
        return np.array([r.best for r in self.records], dtype=float)

    def search_curve(self) -> np.ndarray:
        """Best-so-far after each evaluation past the initial design."""
        return self.best_so_far[self.n_min:]

    def to_frame(self) -> pd.DataFrame:
        X = self.X
        frame = pd.DataFrame(X, columns=[f"x{k + 1}" for k in range(X.shape[1])] if X.size else [])
        frame.insert(0, "index", [r.index for r in self.records])
        frame["y"] = self.y
        frame["best"] = self.best_so_far
        frame["phase"] = [r.phase for r in self.records]
        return frame


def incumbent(trace: RunTrace) -> tuple[np.ndarray, float]:
    """Explored point with the largest response; ties go to the earliest evaluation."""
    if not trace.records:
        raise ValueError("incumbent of an empty trace")
    k = int(np.argmax(trace.y))
    return np.asarray(trace.records[k].x, dtype=float), trace.records[k].y


def write_trace(trace: RunTrace, path: Union[str, Path]) -> Path:
    """Write one JSON object per evaluation."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8") as fh:
            for record in trace.records:
                fh.write(json.dumps(record.to_dict(), default=_to_builtin, sort_keys=True) + "\n")
    except OSError as exc:
        raise OSError(f"could not write trace to {path}: {exc}") from exc
    logger.debug("Wrote %d trace records to %s", len(trace), path)
    return path


def read_trace(path: Union[str, Path], problem: str = "", method: str = "", n_min: int = 0) -> RunTrace:
    """Rebuild a trace from a JSON-lines file written by :func:`write_trace`."""
    path = Path(path)
    trace = RunTrace(problem=problem, method=method, n_min=n_min)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise OSError(f"could not read trace from {path}: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
            trace.append(raw["x"], raw["y"], phase=raw.get("phase", "search"), meta=raw.get("meta"))
        except (KeyError, ValueError) as exc:
            raise ValueError(f"{path}:{lineno}: malformed trace record: {exc}") from exc
    return trace
