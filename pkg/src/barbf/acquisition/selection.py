"""Choosing the next point to evaluate from a candidate set."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Union

import numpy as np
import pandas as pd
from scipy.spatial import cKDTree

from barbf.acquisition.criteria import sei
from barbf.errors import EmptyCandidateSetError
from barbf.surrogate.rbf_model import PosteriorEnsemble
from barbf.testbed.grid import Box, explored_mask, lexicographic_first

logger = logging.getLogger(__name__)

SCORE_CHUNK = 4096


@dataclass(frozen=True)
class AcquisitionContext:
    """Candidates, explored points with responses, and the incumbent value."""

    candidates: np.ndarray
    explored_X: np.ndarray
    explored_y: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "candidates", np.atleast_2d(np.asarray(self.candidates, dtype=float)))
        object.__setattr__(self, "explored_X", np.atleast_2d(np.asarray(self.explored_X, dtype=float)))
        object.__setattr__(self, "explored_y", np.asarray(self.explored_y, dtype=float).ravel())
        if self.explored_X.shape[0] != self.explored_y.shape[0]:
            raise ValueError("explored points and responses differ in length")

    @property
    def f_max(self) -> float:
        return float(self.explored_y.max())

    def feasible(self) -> np.ndarray:
        """Candidates that do not coincide with an explored point."""
        if self.candidates.shape[0] == 0:
            return self.candidates
        return self.candidates[~explored_mask(self.candidates, self.explored_X)]


@dataclass(frozen=True)
class Selection:
    """A chosen point with its criterion value and method-specific metadata."""

    point: np.ndarray
    score: float
    meta: dict[str, Any] = field(default_factory=dict)


def require_feasible(feasible: np.ndarray) -> None:
    if feasible.shape[0] == 0:
        raise EmptyCandidateSetError("no feasible candidate: every candidate has already been explored")


def sei_scores(candidates: np.ndarray, ensemble: PosteriorEnsemble, f_max: float, chunk_size: int = SCORE_CHUNK):
    """SEI at every candidate, computed on the centred scale in candidate chunks."""
    centred_max = f_max - ensemble.y_mean
    scores = np.empty(candidates.shape[0])
    for start in range(0, candidates.shape[0], chunk_size):
        block = candidates[start:start + chunk_size]
        scores[start:start + chunk_size] = sei(ensemble.predict_matrix(block), centred_max)
    return scores


def select_next(ctx: AcquisitionContext, ensemble: PosteriorEnsemble, rng: np.random.Generator) -> Selection:
    """Feasible candidate with the largest SEI; exact ties are broken at random with ``rng``."""
    feasible = ctx.feasible()
    require_feasible(feasible)
    scores = sei_scores(feasible, ensemble, ctx.f_max)
    best = scores.max()
    ties = np.flatnonzero(scores == best)
    pick = int(ties[0]) if ties.size == 1 else int(rng.choice(ties))
    logger.debug("SEI max %.6g at %s (%d tied)", best, feasible[pick], ties.size)
    return Selection(point=feasible[pick].copy(), score=float(best), meta={"sei": float(best), "ties": int(ties.size)})


def acquisition_scores(ctx: AcquisitionContext, ensemble: PosteriorEnsemble) -> pd.DataFrame:
    """SEI of every feasible candidate as a table (coordinates then ``sei``)."""
    feasible = ctx.feasible()
    frame = pd.DataFrame(feasible, columns=[f"x{k + 1}" for k in range(feasible.shape[1])])
    frame["sei"] = sei_scores(feasible, ensemble, ctx.f_max) if feasible.shape[0] else []
    return frame


def export_scores(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format="%.12g")
    except OSError as exc:
        raise OSError(f"could not write acquisition scores to {path}: {exc}") from exc
    return path


def maximin_distance_point(candidates, explored) -> np.ndarray:
    """Candidate farthest from its nearest explored point; ties go to the lexicographically first."""
    candidates = np.atleast_2d(np.asarray(candidates, dtype=float))
    explored = np.atleast_2d(np.asarray(explored, dtype=float))
    if candidates.shape[0] == 0:
        raise EmptyCandidateSetError("no candidate to choose an escape point from")
    dist, _ = cKDTree(explored).query(candidates, k=1)
    if dist.max() <= 0:
        raise EmptyCandidateSetError("no feasible candidate: every candidate has already been explored")
    ties = np.flatnonzero(dist == dist.max())
    return candidates[lexicographic_first(candidates, ties)].copy()


def sample_candidates_uniform(region: Box, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` independent uniform draws over ``region``."""
    if count < 0:
        raise ValueError(f"candidate count must be >= 0, got {count}")
    return rng.uniform(region.lo, region.hi, size=(count, region.dim))
