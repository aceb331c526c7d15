"""Posterior sampling for the spike-and-slab Gaussian RBF model.

One sweep of the chain draws, in order:

1. ``beta`` from its Gaussian full conditional,
2. ``sigma2`` from its inverse-gamma full conditional,
3. every indicator ``gamma_i`` from its Bernoulli full conditional,
4. optionally every centre ``mu_i`` by Metropolis-Hastings,
5. the scales, either one shared ``s`` or one per basis, by Metropolis-Hastings.

The prior on ``beta`` given ``gamma`` is ``N(0, Sigma_tau^2)`` with
``Sigma_tau = diag(a_i * tau_i)``, ``a_i = C`` when ``gamma_i = 1`` and 1
otherwise, so ``C`` multiplies the slab standard deviation.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
import pandas as pd
from scipy import linalg, optimize, stats
from scipy.special import expit

from barbf.errors import FactorizationError
from barbf.surrogate.rbf_model import PosteriorEnsemble, SurrogateState, kernel_matrix
from barbf.testbed.problems import default_c

logger = logging.getLogger(__name__)

SHARED_S = "shared-s"
PER_BASIS_S = "per-basis-s"
S_MODES = (SHARED_S, PER_BASIS_S)

JITTER = 1e-10
TAU_FLOOR = 1e-6
ZETA0_BRACKET = (1e-8, 1e8)


# ── hyperparameters ──────────────────────────────────────────────────────────
@dataclass(frozen=True)
class HyperParams:
    """Prior and proposal settings of the sampler."""

    C: float
    tau: np.ndarray
    p_spike: np.ndarray
    a_s: float = 2.0
    b_s: float = 0.0
    nu0: float = 2.0
    zeta0: float = 1.0
    sigma2_mu: float = 0.001
    sigma2_s: float = 0.5
    omega_mix: float = 0.1

    def __post_init__(self):
        tau = np.atleast_1d(np.asarray(self.tau, dtype=float)).ravel()
        p = np.broadcast_to(np.asarray(self.p_spike, dtype=float), tau.shape).copy()
        issues = []
        if not self.C > 0:
            issues.append(f"C must be > 0 (got {self.C})")
        if np.any(tau <= 0):
            issues.append("tau must be > 0")
        if np.any((p < 0) | (p > 1)):
            issues.append("p_spike must lie in [0, 1]")
        if not self.a_s > 0:
            issues.append(f"a_s must be > 0 (got {self.a_s})")
        if self.b_s < 0:
            issues.append(f"b_s must be >= 0 (got {self.b_s})")
        if not (self.nu0 > 0 and self.zeta0 > 0):
            issues.append(f"nu0 and zeta0 must be > 0 (got {self.nu0}, {self.zeta0})")
        if not (self.sigma2_mu > 0 and self.sigma2_s > 0):
            issues.append("proposal variances must be > 0")
        if not 0.0 <= self.omega_mix <= 1.0:
            issues.append(f"omega_mix must lie in [0, 1] (got {self.omega_mix})")
        if issues:
            raise ValueError("Invalid hyperparameters: " + "; ".join(issues))
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "p_spike", p)

    @property
    def n_bases(self) -> int:
        return int(self.tau.shape[0])

    def with_overrides(self, **overrides) -> "HyperParams":
        unknown = set(overrides) - set(self.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown hyperparameter override(s): {', '.join(sorted(unknown))}")
        return replace(self, **overrides)


def solve_zeta0(target_sd: float, nu0: float = 2.0, rtol: float = 1e-6) -> float:
    """Find ``zeta0`` whose IG(nu0/2, zeta0/2) 99% quantile equals ``target_sd``.

    Bisection on ``[1e-8, 1e8]``; targets outside the reachable range are
    clipped to the bracket end.
    """
    lo, hi = ZETA0_BRACKET

    def gap(zeta: float) -> float:
        return float(stats.invgamma.ppf(0.99, nu0 / 2.0, scale=zeta / 2.0)) - target_sd

    if gap(lo) >= 0:
        return lo
    if gap(hi) <= 0:
        return hi
    return float(optimize.bisect(gap, lo, hi, rtol=rtol))


def default_hyperparams(X, y, C: Optional[float] = None) -> HyperParams:
    """Data-driven defaults for a chain over explored points ``X`` with responses ``y``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    n = y.shape[0]
    if n < 2 or X.shape[0] != n:
        raise ValueError(f"need at least two explored points with matching responses (got {X.shape[0]}, {n})")

    dx = float(np.max(np.ptp(X, axis=0)))
    if dx <= 0:
        logger.warning("Explored points coincide; using unit coordinate range for tau")
        dx = 1.0
    sd = float(np.std(y, ddof=1))
    if not sd > 0:
        logger.warning("Responses have zero variance; flooring tau at %g", TAU_FLOOR)
    tau = max((sd / 5.0) / (3.0 * dx), TAU_FLOOR)
    zeta0 = solve_zeta0(sd if sd > 0 else TAU_FLOOR, nu0=2.0)
    return HyperParams(
        C=float(C) if C is not None else default_c(X.shape[1]),
        tau=np.full(n, tau),
        p_spike=np.full(n, 0.5),
        zeta0=zeta0,
    )


# ── chain configuration ──────────────────────────────────────────────────────
@dataclass(frozen=True)
class ChainConfig:
    """Length, burn-in, thinning and move selection of one chain."""

    n_iter: int = 10000
    burn_frac: float = 0.4
    thin: int = 5
    update_mu: bool = False
    update_s_mode: str = SHARED_S
    seed: Optional[int] = None
    record_diagnostics: bool = False

    def __post_init__(self):
        issues = []
        if self.n_iter < 1:
            issues.append(f"n_iter must be >= 1 (got {self.n_iter})")
        if not 0.0 <= self.burn_frac < 1.0:
            issues.append(f"burn_frac must lie in [0, 1) (got {self.burn_frac})")
        if self.thin < 1:
            issues.append(f"thin must be >= 1 (got {self.thin})")
        if self.update_s_mode not in S_MODES:
            issues.append(f"update_s_mode must be one of {S_MODES} (got {self.update_s_mode!r})")
        if not issues and self.retained_sweeps().size < 1:
            issues.append("chain retains no sweeps; increase n_iter or lower burn_frac/thin")
        if issues:
            raise ValueError("Invalid chain configuration: " + "; ".join(issues))

    @property
    def burn(self) -> int:
        return int(np.floor(self.n_iter * self.burn_frac + 0.5))

    def retained_sweeps(self) -> np.ndarray:
        """1-based sweep numbers kept in the ensemble: ``burn + thin, burn + 2 * thin, ...``."""
        return np.arange(self.burn + self.thin, self.n_iter + 1, self.thin)


# ── Omega: support of the centre prior ───────────────────────────────────────
@dataclass(frozen=True)
class OmegaBox:
    """Smallest box covering the explored points."""

    lo: np.ndarray
    hi: np.ndarray

    @classmethod
    def from_points(cls, X) -> "OmegaBox":
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return cls(lo=X.min(axis=0), hi=X.max(axis=0))

    def extended(self, points) -> "OmegaBox":
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return OmegaBox(lo=np.minimum(self.lo, pts.min(axis=0)), hi=np.maximum(self.hi, pts.max(axis=0)))

    def contains(self, x, tol: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lo - tol) and np.all(x <= self.hi + tol))

    def contains_box(self, other: "OmegaBox") -> bool:
        return bool(np.all(self.lo <= other.lo) and np.all(self.hi >= other.hi))

    @property
    def volume(self) -> float:
        return float(np.prod(self.hi - self.lo))

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(self.lo, self.hi)


# ── Gibbs steps ──────────────────────────────────────────────────────────────
@dataclass(frozen=True)
class GibbsCache:
    """Full-conditional moments of ``beta``.

    ``chol`` is the lower Cholesky factor of the posterior precision
    ``D'D / sigma2 + Sigma_tau^-2``; ``M_mat`` is its inverse.
    """

    h: np.ndarray
    Sigma_tau: np.ndarray
    chol: np.ndarray = field(repr=False)

    @property
    def M_mat(self) -> np.ndarray:
        eye = np.eye(self.h.shape[0])
        return linalg.cho_solve((self.chol, True), eye)


def prior_sd(gamma: np.ndarray, hp: HyperParams) -> np.ndarray:
    """Diagonal of ``Sigma_tau``: ``C * tau_i`` for slab coefficients, ``tau_i`` otherwise."""
    return np.where(np.asarray(gamma) == 1, hp.C, 1.0) * hp.tau


def gibbs_cache(D: np.ndarray, y: np.ndarray, sigma2: float, sigma_tau: np.ndarray) -> GibbsCache:
    D = np.atleast_2d(D)
    sigma_tau = np.asarray(sigma_tau, dtype=float).ravel()
    if D.shape[0] != np.asarray(y).shape[0] or D.shape[1] != sigma_tau.shape[0]:
        raise ValueError(f"shape mismatch: D {D.shape}, y {np.asarray(y).shape}, Sigma_tau {sigma_tau.shape}")
    if not sigma2 > 0:
        raise ValueError(f"sigma2 must be positive, got {sigma2}")
    precision = D.T @ D / sigma2 + np.diag(1.0 / sigma_tau**2)
    try:
        chol = linalg.cholesky(precision, lower=True)
    except linalg.LinAlgError:
        logger.warning("Posterior precision not positive definite; retrying with jitter %g", JITTER)
        try:
            chol = linalg.cholesky(precision + JITTER * np.eye(precision.shape[0]), lower=True)
        except linalg.LinAlgError as exc:
            raise FactorizationError(f"Cholesky of the beta posterior precision failed after jitter: {exc}") from exc
    h = linalg.cho_solve((chol, True), D.T @ np.asarray(y, dtype=float) / sigma2)
    return GibbsCache(h=h, Sigma_tau=sigma_tau, chol=chol)


def sample_beta(D, y_centered, sigma2: float, Sigma_tau, rng: np.random.Generator) -> np.ndarray:
    """One draw from ``N(h, M)``."""
    cache = gibbs_cache(D, y_centered, sigma2, Sigma_tau)
    z = rng.standard_normal(cache.h.shape[0])
    return cache.h + linalg.solve_triangular(cache.chol.T, z, lower=False)


def sample_sigma2(residual_ss: float, n: int, nu0: float, zeta0: float, rng: np.random.Generator) -> float:
    """One draw from ``IG((nu0 + n) / 2, (zeta0 + residual_ss) / 2)``."""
    shape = 0.5 * (nu0 + n)
    scale = 0.5 * (zeta0 + residual_ss)
    return float(scale / rng.gamma(shape))


def gamma_probability(beta, tau, C: float, p):
    """Full-conditional probability that ``gamma_i = 1`` (elementwise over arrays)."""
    beta, tau, p = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (beta, tau, p)))
    with np.errstate(divide="ignore", invalid="ignore"):
        log_slab = np.log1p(-p) - np.log(C * tau) - beta**2 / (2.0 * (C * tau) ** 2)
        log_spike = np.log(p) - np.log(tau) - beta**2 / (2.0 * tau**2)
        prob = expit(log_slab - log_spike)
    prob = np.where(np.isneginf(log_slab) & np.isneginf(log_spike), 0.5, prob)
    return float(prob) if prob.ndim == 0 else prob


def sample_gamma_indicator(i: int, beta, hp: HyperParams, rng: np.random.Generator) -> int:
    prob = gamma_probability(float(beta[i]), float(hp.tau[i]), hp.C, float(hp.p_spike[i]))
    return int(rng.random() < prob)


def sample_gamma(beta, hp: HyperParams, rng: np.random.Generator) -> np.ndarray:
    """All indicators at once.

    Draws one uniform per index in index order, so the result matches calling
    ``sample_gamma_indicator`` for ``i = 0, 1, ...`` on the same generator.
    """
    prob = gamma_probability(np.asarray(beta, dtype=float), hp.tau, hp.C, hp.p_spike)
    return (rng.random(len(prob)) < prob).astype(np.int8)


# ── Metropolis-Hastings steps ────────────────────────────────────────────────
@dataclass(frozen=True)
class ChainData:
    """Explored inputs with centred responses."""

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "X", np.atleast_2d(np.asarray(self.X, dtype=float)))
        object.__setattr__(self, "y", np.asarray(self.y, dtype=float).ravel())


@dataclass(frozen=True)
class MoveResult:
    """Outcome of one MH move; ``design`` is the design matrix of ``state``."""

    state: SurrogateState
    accepted: bool
    design: np.ndarray = field(repr=False)


def _rss(data: ChainData, design: np.ndarray, beta: np.ndarray) -> float:
    resid = data.y - design @ beta
    return float(resid @ resid)


def _accept(log_ratio: float, rng: np.random.Generator) -> bool:
    u = rng.random()
    return bool(u < np.exp(min(0.0, log_ratio)))


def center_move_log_ratio(
    i: int, proposal, state: SurrogateState, omega_box: OmegaBox, data: ChainData, design: np.ndarray
) -> tuple[float, np.ndarray]:
    """Log acceptance ratio of moving centre ``i`` to ``proposal`` and the proposed design matrix."""
    proposal = np.asarray(proposal, dtype=float)
    if not omega_box.contains(proposal):
        return -np.inf, design
    new_design = design.copy()
    new_design[:, i] = kernel_matrix(data.X, proposal[None, :], state.scales[i])[:, 0]
    delta = _rss(data, new_design, state.beta) - _rss(data, design, state.beta)
    return -delta / (2.0 * state.sigma2), new_design


def mh_update_mu(
    i: int,
    state: SurrogateState,
    omega_box: OmegaBox,
    hp: HyperParams,
    data: ChainData,
    rng: np.random.Generator,
    design: Optional[np.ndarray] = None,
) -> MoveResult:
    """Propose centre ``i`` from the uniform/random-walk mixture and accept or reject."""
    design = state.design(data.X) if design is None else design
    if rng.random() < hp.omega_mix:
        proposal = omega_box.sample(rng)
    else:
        proposal = state.centers[i] + rng.normal(0.0, np.sqrt(hp.sigma2_mu), size=state.centers.shape[1])
    log_ratio, new_design = center_move_log_ratio(i, proposal, state, omega_box, data, design)
    if np.isneginf(log_ratio) or not _accept(log_ratio, rng):
        return MoveResult(state, False, design)
    centers = state.centers.copy()
    centers[i] = proposal
    return MoveResult(replace(state, centers=centers), True, new_design)


def _scale_prior_log_ratio(s_new: float, s_old: float, hp: HyperParams) -> float:
    return (hp.a_s - 1.0) * (np.log(s_new) - np.log(s_old)) - hp.b_s * (s_new - s_old)


def scale_move_log_ratio(
    i: Optional[int], s_new: float, state: SurrogateState, hp: HyperParams, data: ChainData, design: np.ndarray
) -> tuple[float, np.ndarray]:
    """Log acceptance ratio for a scale move.

    ``i`` selects one basis; ``None`` moves the shared scale of every basis,
    which then has a single Gamma-kernel prior factor.
    """
    if not s_new > 0:
        return -np.inf, design
    if i is None:
        new_scales = np.full_like(state.scales, s_new)
        new_design = kernel_matrix(data.X, state.centers, new_scales)
        s_old = float(state.scales[0])
    else:
        new_design = design.copy()
        new_design[:, i] = kernel_matrix(data.X, state.centers[i][None, :], s_new)[:, 0]
        s_old = float(state.scales[i])
    delta = _rss(data, new_design, state.beta) - _rss(data, design, state.beta)
    log_ratio = -delta / (2.0 * state.sigma2) + _scale_prior_log_ratio(s_new, s_old, hp)
    return float(log_ratio), new_design


def mh_update_s(
    i: int,
    state: SurrogateState,
    hp: HyperParams,
    data: ChainData,
    rng: np.random.Generator,
    design: Optional[np.ndarray] = None,
) -> MoveResult:
    """Random-walk move on the scale of basis ``i``; non-positive proposals are rejected."""
    design = state.design(data.X) if design is None else design
    s_new = float(state.scales[i] + rng.normal(0.0, np.sqrt(hp.sigma2_s)))
    log_ratio, new_design = scale_move_log_ratio(i, s_new, state, hp, data, design)
    if np.isneginf(log_ratio) or not _accept(log_ratio, rng):
        return MoveResult(state, False, design)
    scales = state.scales.copy()
    scales[i] = s_new
    return MoveResult(replace(state, scales=scales), True, new_design)


def mh_update_shared_s(
    state: SurrogateState,
    hp: HyperParams,
    data: ChainData,
    rng: np.random.Generator,
    design: Optional[np.ndarray] = None,
) -> MoveResult:
    """Random-walk move on the scale shared by all bases."""
    design = state.design(data.X) if design is None else design
    s_new = float(state.scales[0] + rng.normal(0.0, np.sqrt(hp.sigma2_s)))
    log_ratio, new_design = scale_move_log_ratio(None, s_new, state, hp, data, design)
    if np.isneginf(log_ratio) or not _accept(log_ratio, rng):
        return MoveResult(state, False, design)
    return MoveResult(replace(state, scales=np.full_like(state.scales, s_new)), True, new_design)


# ── the chain ────────────────────────────────────────────────────────────────
@dataclass
class ChainDiagnostics:
    """Acceptance counts and, when recorded, per-sweep traces."""

    mu_proposals: int = 0
    mu_accepted: int = 0
    s_proposals: int = 0
    s_accepted: int = 0
    rss: list[float] = field(default_factory=list)
    sigma2: list[float] = field(default_factory=list)
    mean_scale: list[float] = field(default_factory=list)

    @property
    def accept_mu(self) -> Optional[float]:
        return self.mu_accepted / self.mu_proposals if self.mu_proposals else None

    @property
    def accept_s(self) -> Optional[float]:
        return self.s_accepted / self.s_proposals if self.s_proposals else None

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "sweep": np.arange(1, len(self.rss) + 1),
                "rss": self.rss,
                "sigma2": self.sigma2,
                "s": self.mean_scale,
                "accept_mu": self.accept_mu if self.accept_mu is not None else np.nan,
                "accept_s": self.accept_s if self.accept_s is not None else np.nan,
            }
        )


def initial_state(X, y_centered, hp: HyperParams, scale: float) -> SurrogateState:
    """Chain start: ``beta = 0``, all slab indicators, ``sigma2 = Var(y)``, centres at ``X``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    n = X.shape[0]
    var = float(np.var(y_centered, ddof=1)) if n > 1 else 0.0
    return SurrogateState(
        beta=np.zeros(n),
        gamma=np.ones(n, dtype=np.int8),
        sigma2=var if var > 0 else 1e-12,
        centers=X.copy(),
        scales=np.full(n, float(scale)),
    )


def run_chain(
    X,
    y,
    hp: HyperParams,
    cfg: ChainConfig,
    initial_scale: float = 1.0,
    start: Optional[SurrogateState] = None,
) -> PosteriorEnsemble:
    """Run one chain and return the thinned, post-burn-in states.

    Parameters
    ----------
    X, y : array_like
        Explored points and their (uncentred) responses.
    hp : HyperParams
        Priors and proposal settings, one ``tau_i`` per explored point.
    cfg : ChainConfig
        Chain length, thinning, move selection and seed.
    initial_scale : float
        Starting scale of every basis when ``start`` is not given.
    start : SurrogateState, optional
        Explicit starting state (warm start).
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    n = y.shape[0]
    if n < 2 or X.shape[0] != n:
        raise ValueError(f"run_chain needs at least two explored points with matching responses (got {X.shape[0]}, {n})")
    if hp.n_bases != n:
        raise ValueError(f"hyperparameters describe {hp.n_bases} bases but there are {n} explored points")

    rng = np.random.default_rng(cfg.seed)
    y_mean = float(y.mean())
    data = ChainData(X, y - y_mean)
    omega_box = OmegaBox.from_points(X)
    state = start if start is not None else initial_state(X, data.y, hp, initial_scale)
    if state.n_bases != n:
        raise ValueError(f"starting state has {state.n_bases} bases, expected {n}")
    design = state.design(X)

    retained = set(cfg.retained_sweeps().tolist())
    kept: list[SurrogateState] = []
    diag = ChainDiagnostics()

    for sweep in range(1, cfg.n_iter + 1):
        beta = sample_beta(design, data.y, state.sigma2, prior_sd(state.gamma, hp), rng)
        rss = _rss(data, design, beta)
        sigma2 = sample_sigma2(rss, n, hp.nu0, hp.zeta0, rng)
        gamma = sample_gamma(beta, hp, rng)
        state = SurrogateState(beta=beta, gamma=gamma, sigma2=sigma2, centers=state.centers, scales=state.scales)

        if cfg.update_mu:
            for i in range(n):
                move = mh_update_mu(i, state, omega_box, hp, data, rng, design)
                state, design = move.state, move.design
                diag.mu_proposals += 1
                diag.mu_accepted += move.accepted

        if cfg.update_s_mode == SHARED_S:
            move = mh_update_shared_s(state, hp, data, rng, design)
            state, design = move.state, move.design
            diag.s_proposals += 1
            diag.s_accepted += move.accepted
        else:
            for i in range(n):
                move = mh_update_s(i, state, hp, data, rng, design)
                state, design = move.state, move.design
                diag.s_proposals += 1
                diag.s_accepted += move.accepted

        if cfg.record_diagnostics:
            diag.rss.append(_rss(data, design, state.beta))
            diag.sigma2.append(state.sigma2)
            diag.mean_scale.append(float(state.scales.mean()))
        if sweep in retained:
            kept.append(state)

    logger.debug(
        "Chain done: %d sweeps, %d states kept, accept_s=%s accept_mu=%s",
        cfg.n_iter, len(kept), diag.accept_s, diag.accept_mu,
    )
    return PosteriorEnsemble(states=tuple(kept), y_mean=y_mean, diagnostics=diag)
