"""Gaussian RBF surrogate: bases, chain states and posterior prediction.

The model is fitted to centred responses ``y - y_mean``; every prediction
helper here works on the centred scale unless it says otherwise, and
``PosteriorEnsemble.y_mean`` is added back for summaries.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.spatial.distance import cdist


@dataclass(frozen=True)
class RbfBasis:
    """Gaussian basis ``exp(-s^2 * ||x - center||^2)``."""

    center: np.ndarray
    scale: float

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError(f"RBF scale must be positive, got {self.scale}")
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float).ravel())


def rbf_eval(x, basis: RbfBasis) -> float:
    diff = np.asarray(x, dtype=float).ravel() - basis.center
    return float(np.exp(-(basis.scale**2) * float(diff @ diff)))


def kernel_matrix(X: np.ndarray, centers: np.ndarray, scales) -> np.ndarray:
    """Matrix of basis values, entry ``(i, j) = exp(-scales[j]^2 * ||X[i] - centers[j]||^2)``."""
    d2 = cdist(np.atleast_2d(X), np.atleast_2d(centers), "sqeuclidean")
    s = np.broadcast_to(np.asarray(scales, dtype=float), (d2.shape[1],))
    return np.exp(-d2 * s**2)


def design_matrix(X: np.ndarray, bases: Sequence[RbfBasis]) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[0] != len(bases):
        raise ValueError(f"{X.shape[0]} explored points but {len(bases)} bases")
    centers = np.vstack([b.center for b in bases])
    return kernel_matrix(X, centers, [b.scale for b in bases])


@dataclass(frozen=True)
class SurrogateState:
    """One joint draw of ``(beta, gamma, sigma2, centers, scales)``.

    Bases are stored column-wise for speed: ``centers[i]`` and ``scales[i]``
    describe basis ``i``.
    """

    beta: np.ndarray
    gamma: np.ndarray
    sigma2: float
    centers: np.ndarray
    scales: np.ndarray

    def __post_init__(self):
        beta = np.asarray(self.beta, dtype=float).ravel()
        gamma = np.asarray(self.gamma, dtype=np.int8).ravel()
        centers = np.atleast_2d(np.asarray(self.centers, dtype=float))
        scales = np.asarray(self.scales, dtype=float).ravel()
        n = beta.shape[0]
        if gamma.shape[0] != n or centers.shape[0] != n or scales.shape[0] != n:
            raise ValueError(
                f"state lengths disagree: beta={n}, gamma={gamma.shape[0]}, "
                f"centers={centers.shape[0]}, scales={scales.shape[0]}"
            )
        if not self.sigma2 > 0:
            raise ValueError(f"sigma2 must be positive, got {self.sigma2}")
        if np.any(scales <= 0):
            raise ValueError("all RBF scales must be positive")
        if np.any((gamma != 0) & (gamma != 1)):
            raise ValueError("gamma must be a binary vector")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "sigma2", float(self.sigma2))
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "scales", scales)

    @property
    def n_bases(self) -> int:
        return int(self.beta.shape[0])

    @property
    def bases(self) -> tuple[RbfBasis, ...]:
        return tuple(RbfBasis(c, float(s)) for c, s in zip(self.centers, self.scales))

    def design(self, X: np.ndarray) -> np.ndarray:
        return kernel_matrix(X, self.centers, self.scales)


def predict_sample(x, state: SurrogateState) -> float:
    """Centred prediction ``sum_i beta_i r(x; mu_i, s_i)`` of a single state."""
    row = kernel_matrix(np.atleast_2d(np.asarray(x, dtype=float)), state.centers, state.scales)[0]
    return float(row @ state.beta)


@dataclass(frozen=True)
class PosteriorEnsemble:
    """Retained chain states plus the centring constant."""

    states: tuple[SurrogateState, ...]
    y_mean: float = 0.0
    diagnostics: Optional[object] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        states = tuple(self.states)
        if len(states) < 1:
            raise ValueError("a posterior ensemble needs at least one state")
        object.__setattr__(self, "states", states)

    @property
    def size(self) -> int:
        return len(self.states)

    def predict_matrix(self, X: np.ndarray, chunk_size: int = 20000) -> np.ndarray:
        """Centred predictions, shape ``(M, n_points)``.

        States that share centres and scales share one kernel matrix, so a
        shared-scale chain with many rejected scale moves costs one kernel
        evaluation per distinct scale.
        """
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = np.empty((self.size, X.shape[0]))
        groups: dict[bytes, list[int]] = {}
        for k, st in enumerate(self.states):
            key = st.centers.tobytes() + st.scales.tobytes()
            groups.setdefault(key, []).append(k)
        for members in groups.values():
            ref = self.states[members[0]]
            betas = np.column_stack([self.states[k].beta for k in members])
            for start in range(0, X.shape[0], chunk_size):
                stop = start + chunk_size
                phi = kernel_matrix(X[start:stop], ref.centers, ref.scales)
                out[members, start:stop] = (phi @ betas).T
        return out


@dataclass(frozen=True)
class PredictionSummary:
    """Posterior mean, variance and 95% interval width at one point.

    ``variance`` and ``cib`` are ``None`` when the ensemble holds a single
    state.
    """

    mean: float
    variance: Optional[float]
    cib: Optional[float]


def summarize_samples(samples: np.ndarray, y_mean: float = 0.0) -> PredictionSummary:
    samples = np.asarray(samples, dtype=float).ravel()
    mean = float(samples.mean()) + y_mean
    if samples.size < 2:
        return PredictionSummary(mean=mean, variance=None, cib=None)
    lower, upper = np.quantile(samples, [0.025, 0.975], method="linear")
    return PredictionSummary(mean=mean, variance=float(samples.var(ddof=1)), cib=float(upper - lower))


def predict_summary(x, ensemble: PosteriorEnsemble) -> PredictionSummary:
    samples = ensemble.predict_matrix(np.atleast_2d(np.asarray(x, dtype=float)))[:, 0]
    return summarize_samples(samples, ensemble.y_mean)
