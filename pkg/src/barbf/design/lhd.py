"""Maximin Latin hypercube designs for the initial explored points.

Each restart draws a random Latin hypercube with points at bin midpoints
``(k + 0.5) / n`` and improves it by swapping entries within a column, which
preserves the Latin hypercube property. The restart with the largest minimum
pairwise distance wins.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd
from scipy.spatial.distance import pdist, squareform

from barbf.testbed.grid import Box, CandidateGrid

logger = logging.getLogger(__name__)

DEFAULT_RESTARTS = 50


@dataclass(frozen=True)
class Design:
    """``n`` points in ``[0, 1]^p`` forming a Latin hypercube."""

    points: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return int(self.points.shape[0])

    @property
    def p(self) -> int:
        return int(self.points.shape[1])

    def min_distance(self) -> float:
        if self.n < 2:
            return float("inf")
        return float(np.sqrt(pdist(self.points, "sqeuclidean").min()))

    def scaled(self, region: Box) -> np.ndarray:
        """Map the unit-cube design onto ``region``."""
        return region.lo + self.points * region.extent

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.points, columns=[f"x{k + 1}" for k in range(self.p)])


def _random_lhd(n: int, p: int, rng: np.random.Generator) -> np.ndarray:
    cols = [rng.permutation(n) for _ in range(p)]
    return (np.column_stack(cols) + 0.5) / n


def _score(d2: np.ndarray) -> tuple[float, int]:
    # Larger minimum distance first, then fewer pairs sitting at the minimum.
    m = float(d2.min())
    return m, -int(np.count_nonzero(d2 == m))


def _swap_distances(trial: np.ndarray, d2: np.ndarray, a: int, b: int) -> np.ndarray:
    out = d2.copy()
    for r in (a, b):
        row = np.sum((trial - trial[r]) ** 2, axis=1)
        out[r, :] = row
        out[:, r] = row
    out[a, a] = out[b, b] = np.inf
    return out


def _improve_by_swaps(x: np.ndarray, rng: np.random.Generator, max_moves: Optional[int] = None) -> np.ndarray:
    """Hill-climb on column swaps until no swap improves the maximin score.

    A swap can only change the score if it moves a row of some closest pair,
    so each pass tries every such row against every other row and column and
    accepts the first improvement. The score strictly increases over a finite
    set of designs, so the climb terminates; ``max_moves`` optionally caps the
    number of accepted swaps.
    """
    n, p = x.shape
    d2 = squareform(pdist(x, "sqeuclidean"))
    np.fill_diagonal(d2, np.inf)
    best = _score(d2)

    moves = 0
    while max_moves is None or moves < max_moves:
        closest = np.unique(np.nonzero(d2 == best[0]))
        improved = False
        for a in rng.permutation(closest):
            for b in rng.permutation(n):
                if b == a:
                    continue
                for k in range(p):
                    if x[a, k] == x[b, k]:
                        continue
                    trial = x.copy()
                    trial[a, k], trial[b, k] = x[b, k], x[a, k]
                    trial_d2 = _swap_distances(trial, d2, int(a), int(b))
                    score = _score(trial_d2)
                    if score > best:
                        x, d2, best = trial, trial_d2, score
                        improved = True
                        break
                if improved:
                    break
            if improved:
                break
        if not improved:
            break
        moves += 1
    return x


def maximin_lhd(
    n: int,
    p: int,
    seed: Union[int, np.random.SeedSequence, None] = None,
    restarts: int = DEFAULT_RESTARTS,
    max_moves: Optional[int] = None,
) -> Design:
    """Generate a maximin Latin hypercube design.

    Parameters
    ----------
    n, p : int
        Run size and dimension.
    seed : int or SeedSequence
        Seed for the restarts; the same seed gives a bit-identical design.
    restarts : int
        Number of random Latin hypercubes to start from.
    max_moves : int, optional
        Cap on accepted swaps per restart; by default each restart climbs
        until no column swap improves it.
    """
    if n < 1 or p < 1:
        raise ValueError(f"design size and dimension must be positive, got n={n}, p={p}")
    if restarts < 1:
        raise ValueError(f"restarts must be >= 1, got {restarts}")
    rng = np.random.default_rng(seed)
    if n == 1:
        return Design(points=_random_lhd(1, p, rng))

    best_x: Optional[np.ndarray] = None
    best_score: tuple[float, int] = (-np.inf, 0)
    for _ in range(restarts):
        x = _improve_by_swaps(_random_lhd(n, p, rng), rng, max_moves)
        score = _score(pdist(x, "sqeuclidean"))
        if score > best_score:
            best_x, best_score = x, score
    logger.debug("Maximin LHD n=%d p=%d: min distance %.4f over %d restarts", n, p, np.sqrt(best_score[0]), restarts)
    return Design(points=best_x)


def snap_to_grid(points: np.ndarray, grid: CandidateGrid) -> np.ndarray:
    """Move each point to its nearest grid point, keeping the snapped points distinct.

    A point whose nearest grid point is already taken moves to the nearest
    unoccupied one; earlier points keep their place.
    """
    occupied: list[int] = []
    taken: set[int] = set()
    tree = None
    for pt in np.atleast_2d(points):
        idx = grid.snap_index(pt)
        if idx in taken:
            if tree is None:
                tree = grid.tree()
            k = min(grid.size, len(taken) + 1)
            _, neighbours = tree.query(pt, k=k)
            idx = next(int(c) for c in np.atleast_1d(neighbours) if int(c) not in taken)
        taken.add(idx)
        occupied.append(idx)
    return grid.points[occupied].copy()


def export_design(points: np.ndarray, path: Union[str, Path]) -> Path:
    """Write design points as CSV, one point per row."""
    path = Path(path)
    frame = pd.DataFrame(np.atleast_2d(points), columns=[f"x{k + 1}" for k in range(np.atleast_2d(points).shape[1])])
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format="%.12g")
    except OSError as exc:
        raise OSError(f"could not write design to {path}: {exc}") from exc
    return path
