"""Kriging baseline: constant-mean Gaussian process with closed-form EI.

Correlation is anisotropic squared exponential,
``R(x, x') = exp(-0.5 * sum_k ((x_k - x'_k) / l_k)^2)``. Mean and process
variance are profiled out of the likelihood, which is then maximized over
``log l`` with multistart L-BFGS-B.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import linalg, optimize
from scipy.spatial.distance import cdist

from barbf.acquisition.criteria import ei_gaussian
from barbf.acquisition.selection import Selection, require_feasible
from barbf.errors import DuplicatePointError, FactorizationError
from barbf.testbed.grid import explored_mask, lexicographic_first

logger = logging.getLogger(__name__)

BASE_NUGGET = 1e-8
MAX_NUGGET = 1e-4
N_STARTS = 10
# Length-scale search range, relative to the extent of the explored points.
LENGTH_SCALE_RANGE = (1e-3, 1e2)


def correlation(A: np.ndarray, B: np.ndarray, length_scales: np.ndarray) -> np.ndarray:
    ls = np.asarray(length_scales, dtype=float)
    return np.exp(-0.5 * cdist(np.atleast_2d(A) / ls, np.atleast_2d(B) / ls, "sqeuclidean"))


def _factor(R: np.ndarray, nugget: float) -> tuple[np.ndarray, float]:
    """Cholesky of ``R + nugget I``, escalating the nugget tenfold up to ``MAX_NUGGET``."""
    eye = np.eye(R.shape[0])
    while True:
        try:
            return linalg.cholesky(R + nugget * eye, lower=True), nugget
        except linalg.LinAlgError:
            if nugget * 10.0 > MAX_NUGGET * (1.0 + 1e-9):
                raise FactorizationError(f"correlation matrix not positive definite with nugget {nugget:g}") from None
            nugget *= 10.0
            logger.warning("Correlation matrix not positive definite; nugget raised to %g", nugget)


@dataclass(frozen=True)
class GpModel:
    """Fitted kriging model; ``chol`` factors ``R + nugget I`` over ``X``."""

    length_scales: np.ndarray
    process_var: float
    mean: float
    nugget: float
    loglik: float
    X: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    chol: np.ndarray = field(repr=False)

    def _solve(self, b: np.ndarray) -> np.ndarray:
        return linalg.cho_solve((self.chol, True), b)

    def predict(self, Xc) -> tuple[np.ndarray, np.ndarray]:
        """Posterior mean and standard deviation at ``Xc``, including mean-estimation uncertainty."""
        Xc = np.atleast_2d(np.asarray(Xc, dtype=float))
        ones = np.ones(self.X.shape[0])
        r = correlation(Xc, self.X, self.length_scales)
        alpha = self._solve(self.y - self.mean)
        mu = self.mean + r @ alpha
        r_inv_one = self._solve(ones)
        v = linalg.solve_triangular(self.chol, r.T, lower=True)
        u = 1.0 - r @ r_inv_one
        var = self.process_var * (1.0 - np.sum(v**2, axis=0) + u**2 / (ones @ r_inv_one))
        return mu, np.sqrt(np.maximum(var, 0.0))


def profile_loglik(log_ls, X: np.ndarray, y: np.ndarray, nugget: float = BASE_NUGGET) -> tuple[float, dict]:
    """Concentrated log-likelihood at ``exp(log_ls)`` and the profiled quantities."""
    ls = np.exp(np.asarray(log_ls, dtype=float))
    n = X.shape[0]
    chol, used = _factor(correlation(X, X, ls), nugget)
    ones = np.ones(n)
    r_inv_one = linalg.cho_solve((chol, True), ones)
    r_inv_y = linalg.cho_solve((chol, True), y)
    mean = float(ones @ r_inv_y / (ones @ r_inv_one))
    resid = y - mean
    process_var = max(float(resid @ linalg.cho_solve((chol, True), resid)) / n, 1e-300)
    loglik = -0.5 * n * (np.log(process_var) + 1.0 + np.log(2.0 * np.pi)) - float(np.sum(np.log(np.diag(chol))))
    return loglik, {"length_scales": ls, "mean": mean, "process_var": process_var, "chol": chol, "nugget": used}


def ego_fit(
    X,
    y,
    n_starts: int = N_STARTS,
    nugget: float = BASE_NUGGET,
    seed: Optional[int] = None,
) -> GpModel:
    """Maximum-likelihood kriging fit with ``n_starts`` random L-BFGS-B starts."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    n, p = X.shape
    if n < 2 or y.shape[0] != n:
        raise ValueError(f"GP fit needs at least two points with matching responses (got {n}, {y.shape[0]})")
    if cdist(X, X)[np.triu_indices(n, 1)].min() == 0.0:
        raise DuplicatePointError("GP fit received duplicate explored points")

    extent = np.ptp(X, axis=0)
    extent = np.where(extent > 0, extent, 1.0)
    lower = np.log(extent * LENGTH_SCALE_RANGE[0])
    upper = np.log(extent * LENGTH_SCALE_RANGE[1])
    rng = np.random.default_rng(seed)
    starts = rng.uniform(lower, upper, size=(max(1, n_starts), p))

    def objective(theta: np.ndarray) -> float:
        try:
            return -profile_loglik(theta, X, y, nugget)[0]
        except FactorizationError:
            return 1e300

    best_theta, best_value = None, np.inf
    for x0 in starts:
        value0 = objective(x0)
        if value0 < best_value:
            best_theta, best_value = x0.copy(), value0
        res = optimize.minimize(objective, x0, method="L-BFGS-B", bounds=list(zip(lower, upper)))
        if res.fun < best_value:
            best_theta, best_value = np.asarray(res.x, dtype=float), float(res.fun)
        logger.debug("GP multistart from %s: -loglik %.6g -> %.6g", np.round(x0, 3), value0, res.fun)

    if best_theta is None or not np.isfinite(best_value) or best_value >= 1e300:
        raise FactorizationError("no length-scale setting gave a positive definite correlation matrix")
    loglik, parts = profile_loglik(best_theta, X, y, nugget)
    return GpModel(
        length_scales=parts["length_scales"],
        process_var=parts["process_var"],
        mean=parts["mean"],
        nugget=parts["nugget"],
        loglik=loglik,
        X=X.copy(),
        y=y.copy(),
        chol=parts["chol"],
    )


def ego_select(candidates, gp: GpModel, explored, f_max: float) -> Selection:
    """Feasible candidate with the largest expected improvement; ties go to the lexicographically first."""
    candidates = np.atleast_2d(np.asarray(candidates, dtype=float))
    feasible = candidates[~explored_mask(candidates, np.atleast_2d(np.asarray(explored, dtype=float)))]
    require_feasible(feasible)
    mu, sd = gp.predict(feasible)
    ei = ei_gaussian(mu, sd, f_max)
    ei = np.atleast_1d(ei)
    ties = np.flatnonzero(ei == ei.max())
    pick = lexicographic_first(feasible, ties)
    return Selection(
        point=feasible[pick].copy(),
        score=float(ei[pick]),
        meta={"ei": float(ei[pick]), "gp_mean": float(mu[pick]), "gp_sd": float(sd[pick])},
    )
