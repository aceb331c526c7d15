"""Axis-aligned regions and evenly spaced candidate grids."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

# Relative slack when checking that a step divides the extent of a region.
_STEP_TOL = 1e-9


@dataclass(frozen=True)
class Box:
    """Closed box ``[lo, hi]`` with ``lo < hi`` in every dimension."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=float).ravel()
        hi = np.asarray(self.hi, dtype=float).ravel()
        if lo.shape != hi.shape or lo.size == 0:
            raise ValueError("box bounds must be non-empty vectors of equal length")
        if np.any(lo >= hi):
            raise ValueError(f"box bounds must satisfy lo < hi, got lo={lo.tolist()} hi={hi.tolist()}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def unit(cls, dim: int) -> "Box":
        return cls(np.zeros(dim), np.ones(dim))

    @property
    def dim(self) -> int:
        return int(self.lo.shape[0])

    @property
    def extent(self) -> np.ndarray:
        return self.hi - self.lo


@dataclass(frozen=True)
class CandidateGrid:
    """Lattice of points over a box, in lexicographic order.

    ``counts[k]`` is the number of levels along dimension ``k``; the first
    dimension varies slowest.
    """

    region: Box
    step: np.ndarray
    counts: tuple[int, ...]
    points: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return int(self.points.shape[0])

    def snap_index(self, x) -> int:
        """Flat index of the grid point nearest to ``x`` (coordinate-wise rounding)."""
        arr = np.asarray(x, dtype=float)
        k = np.rint((arr - self.region.lo) / self.step).astype(int)
        k = np.clip(k, 0, np.asarray(self.counts) - 1)
        return int(np.ravel_multi_index(tuple(k), self.counts))

    def contains(self, x, atol: float = 1e-12) -> bool:
        idx = self.snap_index(x)
        return bool(np.all(np.abs(self.points[idx] - np.asarray(x, dtype=float)) <= atol))

    def tree(self) -> cKDTree:
        return cKDTree(self.points)


def grid_counts(region: Box, step) -> tuple[int, ...]:
    """Number of grid levels per dimension, ``floor((hi - lo) / step) + 1``."""
    steps = np.broadcast_to(np.asarray(step, dtype=float), region.lo.shape)
    if np.any(steps <= 0):
        raise ValueError(f"grid step must be positive, got {np.asarray(step).tolist()}")
    ratio = region.extent / steps
    rounded = np.rint(ratio)
    if np.any(np.abs(ratio - rounded) > _STEP_TOL * np.maximum(1.0, rounded)):
        raise ValueError(f"grid step {steps.tolist()} does not divide region extent {region.extent.tolist()}")
    return tuple(int(n) + 1 for n in rounded)


def make_grid(region: Box, step) -> CandidateGrid:
    """Build the evenly spaced grid ``lo, lo + step, ..., hi`` over ``region``.

    Coordinates come from integer indices (``lo + k * step``) with the last
    level pinned to ``hi``, so membership tests are exact.
    """
    counts = grid_counts(region, step)
    steps = np.broadcast_to(np.asarray(step, dtype=float), region.lo.shape).copy()
    axes = []
    for k, n in enumerate(counts):
        levels = region.lo[k] + np.arange(n) * steps[k]
        levels[-1] = region.hi[k]
        axes.append(levels)
    mesh = np.meshgrid(*axes, indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=1)
    return CandidateGrid(region=region, step=steps, counts=counts, points=points)


def lexicographic_first(points: np.ndarray, indices: np.ndarray) -> int:
    """Among ``indices`` into ``points``, return the one whose point sorts first."""
    if indices.size == 1:
        return int(indices[0])
    sub = points[indices]
    order = np.lexsort(sub.T[::-1])
    return int(indices[order[0]])


def explored_mask(candidates: np.ndarray, explored: np.ndarray, atol: float = 1e-12) -> np.ndarray:
    """Boolean mask of candidates that coincide with an explored point."""
    if candidates.shape[0] == 0 or explored is None or len(explored) == 0:
        return np.zeros(candidates.shape[0], dtype=bool)
    dist, _ = cKDTree(np.atleast_2d(explored)).query(candidates, k=1)
    return dist <= atol
