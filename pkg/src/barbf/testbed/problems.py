"""Named test problems and brute-force grid scans."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache, partial
from typing import Callable, Optional

import numpy as np

from barbf.testbed.functions import eval_branin, eval_hartmann4, eval_rastrigin, eval_ronkkonen
from barbf.testbed.grid import Box, CandidateGrid, make_grid

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TestProblem:
    """An objective with its region, default grid step and known optimum.

    ``known_optimum`` is the grid optimum reported for ``grid_step`` (or the
    continuous optimum for grid-free problems); ``known_argmax`` its location.
    """

    __test__ = False  # not a pytest class

    name: str
    dim: int
    region: Box
    objective: Callable = field(repr=False, compare=False)
    grid_step: Optional[float] = None
    known_optimum: Optional[float] = None
    known_argmax: Optional[tuple[float, ...]] = None
    default_c: float = 10.0

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"problem dimension must be positive, got {self.dim}")
        if self.region.dim != self.dim:
            raise ValueError(f"region dimension {self.region.dim} != problem dimension {self.dim}")

    def __call__(self, x):
        return self.objective(x)


# Slab multipliers used in the experiments, by dimension.
DEFAULT_C_BY_DIM = {2: 25.0, 3: 15.0, 4: 10.0}


def default_c(dim: int) -> float:
    return DEFAULT_C_BY_DIM.get(dim, 10.0)


def _rastrigin(dim: int) -> TestProblem:
    return TestProblem(
        name=f"rastrigin:{dim}",
        dim=dim,
        region=Box.unit(dim),
        objective=partial(eval_rastrigin, d=dim),
        grid_step=None,
        known_optimum=0.0,
        known_argmax=tuple([0.5] * dim),
        default_c=default_c(dim),
    )


_FIXED_PROBLEMS: dict[str, Callable[[], TestProblem]] = {
    "branin": lambda: TestProblem(
        name="branin",
        dim=2,
        region=Box.unit(2),
        objective=eval_branin,
        grid_step=0.04,
        known_optimum=1.0473,
        known_argmax=(0.96, 0.16),
        default_c=25.0,
    ),
    "ronkkonen2": lambda: TestProblem(
        name="ronkkonen2",
        dim=2,
        region=Box.unit(2),
        objective=partial(eval_ronkkonen, d=2),
        grid_step=0.04,
        known_optimum=0.4777,
        default_c=25.0,
    ),
    "ronkkonen3": lambda: TestProblem(
        name="ronkkonen3",
        dim=3,
        region=Box.unit(3),
        objective=partial(eval_ronkkonen, d=3),
        grid_step=0.04,
        known_optimum=0.3584,
        known_argmax=(0.32, 0.68, 0.44),
        default_c=15.0,
    ),
    "hartmann4": lambda: TestProblem(
        name="hartmann4",
        dim=4,
        region=Box.unit(4),
        objective=eval_hartmann4,
        grid_step=0.05,
        known_optimum=3.1218,
        default_c=10.0,
    ),
}


def problem_names() -> list[str]:
    return sorted(_FIXED_PROBLEMS) + ["rastrigin:<d>"]


def get_problem(name: str) -> TestProblem:
    """Look up a problem by name (``branin``, ``ronkkonen2``, ``ronkkonen3``, ``hartmann4``, ``rastrigin:d``)."""
    key = name.strip().lower()
    if key in _FIXED_PROBLEMS:
        return _FIXED_PROBLEMS[key]()
    if key.startswith("rastrigin"):
        _, _, dim_txt = key.partition(":")
        try:
            dim = int(dim_txt) if dim_txt else 8
        except ValueError:
            raise ValueError(f"invalid Rastrigin dimension in problem name '{name}'") from None
        if dim < 1:
            raise ValueError(f"invalid Rastrigin dimension in problem name '{name}'")
        return _rastrigin(dim)
    raise ValueError(f"unknown problem '{name}'; choose from {', '.join(problem_names())}")


@dataclass(frozen=True)
class GridScan:
    """Result of evaluating a problem at every point of a grid."""

    grid: CandidateGrid = field(repr=False)
    values: np.ndarray = field(repr=False)
    best_value: float
    argmax: np.ndarray

    def maximizers(self, decimals: int = 4) -> np.ndarray:
        """Grid points whose value matches the maximum at ``decimals`` reporting precision."""
        target = np.round(self.best_value, decimals)
        mask = np.round(self.values, decimals) == target
        return self.grid.points[mask]


def scan_grid(problem: TestProblem, step: Optional[float] = None) -> GridScan:
    """Evaluate ``problem`` over its grid and return the maximum (earliest in lexicographic order on ties)."""
    step = problem.grid_step if step is None else step
    if step is None:
        raise ValueError(f"problem '{problem.name}' has no grid step; pass one explicitly")
    grid = make_grid(problem.region, step)
    values = np.asarray(problem.objective(grid.points), dtype=float)
    best = int(np.argmax(values))
    logger.debug("Scanned %d grid points of %s: max %.6f", grid.size, problem.name, values[best])
    return GridScan(grid=grid, values=values, best_value=float(values[best]), argmax=grid.points[best].copy())


@lru_cache(maxsize=16)
def grid_optimum(name: str, step: float) -> float:
    """Cached grid maximum of a named problem."""
    return scan_grid(get_problem(name), step).best_value
