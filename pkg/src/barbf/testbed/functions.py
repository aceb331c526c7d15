"""Benchmark objectives on the unit hypercube.

All objectives are written for maximization and accept either a single point
of shape ``(d,)`` (returning a float) or a batch of shape ``(n, d)``
(returning an array of ``n`` values), so that exhaustive grid scans stay
vectorized.
"""
from __future__ import annotations

import numpy as np
from scipy.special import comb

from barbf.errors import OutOfDomainError

DOMAIN_TOL = 1e-12

# Bernstein control values of the Ronkkonen polynomials, one row per coordinate.
RONKKONEN_P = np.array(
    [
        [0.0, 0.1, 0.2, 0.5, 1.0],
        [0.0, 0.5, 0.8, 0.9, 1.0],
        [0.0, 0.6, 0.7, 0.9, 1.0],
    ]
)

HARTMANN_ALPHA = np.array([1.0, 1.2, 3.0, 3.2])
HARTMANN_A = np.array(
    [
        [10.0, 3.0, 17.0, 3.5],
        [0.05, 10.0, 17.0, 0.1],
        [3.0, 3.5, 1.7, 10.0],
        [17.0, 8.0, 0.05, 10.0],
    ]
)
HARTMANN_P = 1e-4 * np.array(
    [
        [1312.0, 1696.0, 5569.0, 124.0],
        [2329.0, 4135.0, 8307.0, 3736.0],
        [2348.0, 1451.0, 3522.0, 2883.0],
        [4047.0, 8828.0, 8732.0, 5743.0],
    ]
)


def check_domain(x, lo, hi, tol: float = DOMAIN_TOL) -> np.ndarray:
    """Return ``x`` as a float array after checking it lies in ``[lo, hi]``.

    Raises
    ------
    OutOfDomainError
        If any coordinate falls outside the closed box by more than ``tol``,
        or the trailing dimension does not match the box.
    """
    arr = np.asarray(x, dtype=float)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if arr.ndim == 0 or arr.shape[-1] != lo.shape[0]:
        raise OutOfDomainError(f"expected points of dimension {lo.shape[0]}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise OutOfDomainError("point contains non-finite coordinates")
    if np.any(arr < lo - tol) or np.any(arr > hi + tol):
        raise OutOfDomainError(f"point outside region [{lo.tolist()}, {hi.tolist()}]")
    return arr


def _unit_box(d: int) -> tuple[np.ndarray, np.ndarray]:
    return np.zeros(d), np.ones(d)


def _scalar_or_array(values: np.ndarray, single: bool):
    return float(values) if single else values


def eval_branin(x) -> float | np.ndarray:
    """Scaled and negated Branin function on ``[0, 1]^2``."""
    arr = check_domain(x, *_unit_box(2))
    single = arr.ndim == 1
    pts = np.atleast_2d(arr)
    x1 = 15.0 * pts[:, 0] - 5.0
    x2 = 15.0 * pts[:, 1]
    quad = (x2 - 5.1 * x1**2 / (4.0 * np.pi**2) + 5.0 * x1 / np.pi - 6.0) ** 2
    trig = (10.0 - 10.0 / (8.0 * np.pi)) * np.cos(x1)
    values = -(quad + trig - 44.81) / 51.95
    return _scalar_or_array(values[0] if single else values, single)


def ronkkonen_w(x: np.ndarray, control: np.ndarray) -> np.ndarray:
    """Quartic Bernstein polynomial with the given control values, evaluated elementwise."""
    degree = control.shape[0] - 1
    j = np.arange(degree + 1)
    xs = np.asarray(x, dtype=float)[..., None]
    basis = comb(degree, j) * (1.0 - xs) ** (degree - j) * xs**j
    return basis @ control


def eval_ronkkonen(x, d: int | None = None) -> float | np.ndarray:
    """Negated Ronkkonen multimodal function in two or three dimensions.

    The prefactor is ``1 / 2**d``; at ``d = 2`` this is the usual one quarter.
    """
    arr = np.asarray(x, dtype=float)
    d = arr.shape[-1] if d is None else d
    if d not in (2, 3):
        raise ValueError(f"Ronkkonen function is defined for d in {{2, 3}}, got {d}")
    arr = check_domain(arr, *_unit_box(d))
    single = arr.ndim == 1
    pts = np.atleast_2d(arr)
    total = np.zeros(pts.shape[0])
    for i in range(d):
        w = ronkkonen_w(pts[:, i], RONKKONEN_P[i])
        total += np.cos(4.0 * np.pi * w) + 0.8 * np.cos(8.0 * np.pi * w)
    values = -total / 2.0**d
    return _scalar_or_array(values[0] if single else values, single)


def eval_hartmann4(x) -> float | np.ndarray:
    """Negated, rescaled four-dimensional Hartmann function."""
    arr = check_domain(x, *_unit_box(4))
    single = arr.ndim == 1
    pts = np.atleast_2d(arr)
    diff = pts[:, None, :] - HARTMANN_P[None, :, :]
    inner = np.exp(-np.sum(HARTMANN_A[None, :, :] * diff**2, axis=2))
    values = -(1.1 - inner @ HARTMANN_ALPHA) / 0.839
    return _scalar_or_array(values[0] if single else values, single)


def eval_rastrigin(x, d: int | None = None) -> float | np.ndarray:
    """Negated Rastrigin-type function centred at ``0.5`` in every coordinate."""
    arr = np.asarray(x, dtype=float)
    d = arr.shape[-1] if d is None else d
    if d < 1:
        raise ValueError(f"dimension must be positive, got {d}")
    arr = check_domain(arr, *_unit_box(d))
    single = arr.ndim == 1
    pts = np.atleast_2d(arr)
    z = pts - 0.5
    values = -10.0 * d - np.sum(z - 10.0 * np.cos(2.0 * np.pi * z), axis=1)
    return _scalar_or_array(values[0] if single else values, single)
