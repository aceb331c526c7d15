"""Improvement criteria for maximization."""
from __future__ import annotations

import numpy as np
from scipy.stats import norm


def sei(samples_at_x, f_max: float, axis: int = 0):
    """Sampled expected improvement: mean of ``max(y_m - f_max, 0)`` over posterior samples.

    ``samples_at_x`` may hold one point's samples (1-D) or an ``(M, n)``
    matrix for ``n`` candidates, in which case one value per candidate is
    returned.
    """
    samples = np.asarray(samples_at_x, dtype=float)
    if samples.shape[axis] < 1:
        raise ValueError("sampled expected improvement needs at least one posterior sample")
    improvement = np.maximum(samples - f_max, 0.0)
    value = improvement.mean(axis=axis)
    return float(value) if np.ndim(value) == 0 else value


def ei_gaussian(mu, s0, f_max: float):
    """Closed-form expected improvement of a Gaussian prediction ``N(mu, s0^2)``.

    Degenerates to ``max(mu - f_max, 0)`` where ``s0 == 0``.
    """
    mu, s0 = np.broadcast_arrays(np.asarray(mu, dtype=float), np.asarray(s0, dtype=float))
    if np.any(s0 < 0):
        raise ValueError("predictive standard deviation must be non-negative")
    gain = mu - f_max
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(s0 > 0, gain / s0, 0.0)
        smooth = gain * norm.cdf(z) + s0 * norm.pdf(z)
    value = np.where(s0 > 0, np.maximum(smooth, 0.0), np.maximum(gain, 0.0))
    return float(value) if value.ndim == 0 else value
