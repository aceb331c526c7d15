"""Benchmark objectives, regions and candidate grids."""

from barbf.testbed.functions import (
    check_domain,
    eval_branin,
    eval_hartmann4,
    eval_rastrigin,
    eval_ronkkonen,
)
from barbf.testbed.grid import Box, CandidateGrid, make_grid
from barbf.testbed.problems import GridScan, TestProblem, get_problem, grid_optimum, problem_names, scan_grid

__all__ = [
    "Box",
    "CandidateGrid",
    "GridScan",
    "TestProblem",
    "check_domain",
    "eval_branin",
    "eval_hartmann4",
    "eval_rastrigin",
    "eval_ronkkonen",
    "get_problem",
    "grid_optimum",
    "make_grid",
    "problem_names",
    "scan_grid",
]
