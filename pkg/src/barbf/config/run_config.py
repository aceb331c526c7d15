"""Settings of a single optimization run."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

from barbf.surrogate.mcmc import ChainConfig
from barbf.testbed.problems import TestProblem

BARBF = "barbf"
M_BARBF = "m-barbf"
BARBF_GRIDFREE = "barbf-gridfree"
GMSRBF = "gmsrbf"
EGO = "ego"
METHODS = (BARBF, M_BARBF, BARBF_GRIDFREE, GMSRBF, EGO)
BAYESIAN_METHODS = (BARBF, M_BARBF, BARBF_GRIDFREE)

GRID = "grid"
UNIFORM = "uniform"
CANDIDATE_MODES = (GRID, UNIFORM)

# Scalar HyperParams fields a run may override; C has its own field.
OVERRIDABLE_HYPERPARAMS = ("a_s", "b_s", "nu0", "zeta0", "sigma2_mu", "sigma2_s", "omega_mix")


@dataclass(frozen=True)
class RunConfig:
    """One run: problem, method, budget, candidates and sampler settings.

    ``grid_step`` and ``c_slab`` fall back to the problem defaults when
    ``None``. ``candidate_mode`` ``None`` means grid when the problem has a
    grid and uniform sampling otherwise; the grid-free method always samples.
    """

    problem: str = "branin"
    method: str = BARBF
    n_min: int = 16
    n_max: int = 46
    grid_step: Optional[float] = None
    n_candidates: int = 8000
    candidate_mode: Optional[str] = None
    chain: ChainConfig = field(default_factory=ChainConfig)
    c_slab: Optional[float] = None
    hyper_overrides: dict[str, float] = field(default_factory=dict)
    escape_m_i: int = 3
    escape_m_t: int = 3
    seed: Optional[int] = None
    lhd_restarts: int = 50
    warm_start: bool = False
    loo_scales: Optional[tuple[float, ...]] = None
    record_diagnostics: bool = False
    ego_starts: int = 10

    def resolved_candidate_mode(self, problem: TestProblem) -> str:
        if self.method == BARBF_GRIDFREE:
            return UNIFORM
        if self.candidate_mode is not None:
            return self.candidate_mode
        return GRID if (self.grid_step or problem.grid_step) else UNIFORM

    def resolved_grid_step(self, problem: TestProblem) -> Optional[float]:
        return self.grid_step if self.grid_step is not None else problem.grid_step

    def resolved_c(self, problem: TestProblem) -> float:
        return float(self.c_slab) if self.c_slab is not None else problem.default_c

    def with_seed(self, seed: Optional[int]) -> "RunConfig":
        return replace(self, seed=seed)


@dataclass(frozen=True)
class Experiment:
    """A run configuration repeated ``reps`` times from ``seed``."""

    run: RunConfig = field(default_factory=RunConfig)
    reps: int = 1
    seed: int = 0
    jobs: Optional[int] = None
    strict: bool = False
    out: Optional[str] = None
    name: str = ""
    description: str = ""
