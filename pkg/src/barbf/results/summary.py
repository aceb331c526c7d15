"""Aggregates over replications: the best-value table row and the quantile curves."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Any, Optional, Sequence

import numpy as np
import pandas as pd

HIT_TOL = 1e-4
# Linear interpolation between order statistics.
QUANTILE_METHOD = "linear"
TABLE_QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)


def quantiles(values, probs: Sequence[float] = TABLE_QUANTILES, axis: int = 0) -> np.ndarray:
    return np.quantile(np.asarray(values, dtype=float), probs, axis=axis, method=QUANTILE_METHOD)


@dataclass(frozen=True)
class ReplicationSummary:
    """Distribution of the final best value over successful replications.

    ``hits`` counts replications within ``hit_tol`` of ``grid_optimum`` and is
    ``None`` when the run has no grid optimum.
    """

    problem: str
    method: str
    best_values: tuple[float, ...]
    q05: float
    q1: float
    median: float
    q3: float
    q95: float
    mean: float
    std: float
    hits: Optional[int]
    grid_optimum: Optional[float] = None
    hit_tol: float = HIT_TOL
    n_failed: int = 0
    base_seed: Optional[int] = None
    config: dict[str, Any] = field(default_factory=dict)

    @property
    def n_success(self) -> int:
        return len(self.best_values)

    def to_dict(self) -> dict[str, Any]:
        out = asdict(self)
        out["best_values"] = list(self.best_values)
        return out

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> "ReplicationSummary":
        data = dict(raw)
        data["best_values"] = tuple(float(v) for v in data["best_values"])
        return cls(**data)

    def table_row(self) -> pd.Series:
        """One row of a method comparison table."""
        return pd.Series(
            {
                "5%": self.q05,
                "Q1": self.q1,
                "median": self.median,
                "Q3": self.q3,
                "95%": self.q95,
                "mean": self.mean,
                "std": self.std,
                "hits": f"{self.hits}/{self.n_success}" if self.hits is not None else "-",
            },
            name=f"{self.problem}/{self.method}",
        )


@dataclass(frozen=True)
class QuantileCurves:
    """Mean, 5% and 95% quantiles of best-so-far per search iteration (1-based)."""

    iteration: np.ndarray
    mean: np.ndarray
    q05: np.ndarray
    q95: np.ndarray

    def __len__(self) -> int:
        return int(self.iteration.shape[0])

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"iteration": self.iteration, "mean": self.mean, "q05": self.q05, "q95": self.q95})

    @classmethod
    def empty(cls) -> "QuantileCurves":
        e = np.empty(0)
        return cls(iteration=np.empty(0, dtype=int), mean=e, q05=e, q95=e)


def summarize_bests(
    best_values: Sequence[float],
    problem: str = "",
    method: str = "",
    grid_optimum: Optional[float] = None,
    hit_tol: float = HIT_TOL,
    n_failed: int = 0,
    base_seed: Optional[int] = None,
    config: Optional[dict[str, Any]] = None,
) -> ReplicationSummary:
    """Table statistics of the final best values; needs at least one value."""
    values = np.asarray(best_values, dtype=float)
    if values.size == 0:
        raise ValueError("cannot summarise zero successful replications")
    q05, q1, med, q3, q95 = (float(v) for v in quantiles(values))
    hits = None
    if grid_optimum is not None:
        hits = int(np.sum(np.abs(values - grid_optimum) <= hit_tol))
    return ReplicationSummary(
        problem=problem,
        method=method,
        best_values=tuple(float(v) for v in values),
        q05=q05,
        q1=q1,
        median=med,
        q3=q3,
        q95=q95,
        mean=float(values.mean()),
        std=float(values.std(ddof=1)) if values.size > 1 else 0.0,
        hits=hits,
        grid_optimum=grid_optimum,
        hit_tol=hit_tol,
        n_failed=n_failed,
        base_seed=base_seed,
        config=dict(config or {}),
    )


def quantile_curves(curves: Sequence[np.ndarray]) -> QuantileCurves:
    """Aggregate per-replication best-so-far curves of equal length."""
    if len(curves) == 0:
        return QuantileCurves.empty()
    stacked = np.vstack([np.asarray(c, dtype=float) for c in curves])
    q05, q95 = quantiles(stacked, (0.05, 0.95), axis=0)
    return QuantileCurves(
        iteration=np.arange(1, stacked.shape[1] + 1),
        mean=stacked.mean(axis=0),
        q05=q05,
        q95=q95,
    )
