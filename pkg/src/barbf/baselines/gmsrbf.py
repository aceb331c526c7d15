"""Interpolating Gaussian RBF baseline with cycling response/distance weights."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import linalg
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist

from barbf.acquisition.selection import Selection, require_feasible
from barbf.errors import DuplicatePointError, FactorizationError
from barbf.surrogate.rbf_model import kernel_matrix
from barbf.testbed.grid import explored_mask, lexicographic_first

logger = logging.getLogger(__name__)

JITTER = 1e-10
WEIGHT_SEQUENCE = (1.0, 0.8, 0.6, 0.4, 0.2)
DEFAULT_LOO_SCALES = np.geomspace(0.1, 50.0, 20)
# Scales whose kernel matrix is numerically singular are skipped by the LOO search.
_MIN_RCOND = 1e-15


@dataclass(frozen=True)
class GmsrbfModel:
    """``s_N(x) = sum_j lambda_j exp(-s^2 ||x - x_j||^2)`` interpolating the explored responses."""

    lambdas: np.ndarray
    scale: float
    centers: np.ndarray = field(repr=False)

    def predict(self, X) -> np.ndarray:
        return kernel_matrix(np.atleast_2d(np.asarray(X, dtype=float)), self.centers, self.scale) @ self.lambdas


class WeightCycle:
    """Endless cycle over the distance weights ``1, 0.8, 0.6, 0.4, 0.2``."""

    def __init__(self, sequence: Sequence[float] = WEIGHT_SEQUENCE, cursor: int = 0):
        if not sequence:
            raise ValueError("weight sequence must not be empty")
        self.sequence = tuple(float(w) for w in sequence)
        self.cursor = cursor % len(self.sequence)

    def next_weight(self) -> float:
        weight = self.sequence[self.cursor]
        self.cursor = (self.cursor + 1) % len(self.sequence)
        return weight

    def __repr__(self) -> str:
        return f"WeightCycle(sequence={self.sequence}, cursor={self.cursor})"


def _check_distinct(X: np.ndarray) -> None:
    if X.shape[0] > 1 and pdist(X, "sqeuclidean").min() == 0.0:
        raise DuplicatePointError("interpolating RBF fit received duplicate explored points")


def _solve(phi: np.ndarray, y: np.ndarray) -> np.ndarray:
    try:
        return linalg.solve(phi, y, assume_a="sym")
    except linalg.LinAlgError:
        logger.warning("RBF interpolation matrix singular; retrying with jitter %g", JITTER)
        try:
            return linalg.solve(phi + JITTER * np.eye(phi.shape[0]), y, assume_a="sym")
        except linalg.LinAlgError as exc:
            raise FactorizationError(f"RBF interpolation solve failed after jitter: {exc}") from exc


def gmsrbf_fit(X, y, s: float) -> GmsrbfModel:
    """Solve ``Phi lambda = F`` for the interpolation coefficients."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    if X.shape[0] != y.shape[0]:
        raise ValueError(f"{X.shape[0]} points but {y.shape[0]} responses")
    if not s > 0:
        raise ValueError(f"RBF scale must be positive, got {s}")
    _check_distinct(X)
    phi = kernel_matrix(X, X, s)
    return GmsrbfModel(lambdas=_solve(phi, y), scale=float(s), centers=X.copy())


def loo_cost(X, y, s: float) -> Optional[float]:
    """Sum of squared leave-one-out errors ``lambda_i / (Phi^-1)_ii``; ``None`` when ``Phi`` is singular."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    phi = kernel_matrix(X, X, s)
    if 1.0 / np.linalg.cond(phi) < _MIN_RCOND:
        return None
    try:
        inv = linalg.inv(phi)
    except linalg.LinAlgError:
        return None
    errors = (inv @ y) / np.diag(inv)
    if not np.all(np.isfinite(errors)):
        return None
    return float(errors @ errors)


def choose_scale_loo(X, y, s_grid: Optional[Sequence[float]] = None) -> float:
    """Scale from ``s_grid`` with the smallest leave-one-out cost; ties go to the smallest scale."""
    grid = np.sort(np.asarray(DEFAULT_LOO_SCALES if s_grid is None else s_grid, dtype=float))
    if grid.size == 0:
        raise ValueError("scale grid must not be empty")
    _check_distinct(np.atleast_2d(np.asarray(X, dtype=float)))
    best_s, best_cost = None, np.inf
    skipped = []
    for s in grid:
        cost = loo_cost(X, y, float(s))
        if cost is None:
            skipped.append(float(s))
            continue
        logger.debug("LOO cost at s=%.4g: %.6g", s, cost)
        if best_s is None or cost < best_cost:
            best_s, best_cost = float(s), cost
    if skipped:
        logger.warning("Skipped %d singular scale(s) in LOO search: %s", len(skipped), skipped)
    if best_s is None:
        raise FactorizationError("every candidate scale gave a singular interpolation matrix")
    return best_s


def _minmax(values: np.ndarray) -> np.ndarray:
    lo, hi = values.min(), values.max()
    if hi == lo:
        return np.ones_like(values)
    return (values - lo) / (hi - lo)


def gmsrbf_select(candidates, model: GmsrbfModel, explored, cycle: WeightCycle) -> Selection:
    """Maximize ``(1 - w) V_R + w V_D`` over the feasible candidates.

    ``V_R`` is the min-max scaled prediction, ``V_D`` the min-max scaled
    squared distance to the nearest explored point; both are 1 when constant.
    The weight ``w`` is the next entry of ``cycle``.
    """
    candidates = np.atleast_2d(np.asarray(candidates, dtype=float))
    explored = np.atleast_2d(np.asarray(explored, dtype=float))
    feasible = candidates[~explored_mask(candidates, explored)]
    require_feasible(feasible)

    weight = cycle.next_weight()
    v_r = _minmax(model.predict(feasible))
    dist, _ = cKDTree(explored).query(feasible, k=1)
    v_d = _minmax(dist**2)
    score = (1.0 - weight) * v_r + weight * v_d
    ties = np.flatnonzero(score == score.max())
    pick = lexicographic_first(feasible, ties)
    return Selection(point=feasible[pick].copy(), score=float(score[pick]), meta={"weight": weight})
