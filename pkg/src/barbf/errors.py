"""Exception types raised by barbf.

Input problems derive from ``ValueError``, numerical or run failures from
``RuntimeError``, so callers that only care about the broad category can keep
catching the builtins.
"""
from __future__ import annotations

from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from barbf.optimizer.trace import RunTrace


class OutOfDomainError(ValueError):
    """A point lies outside the region of a test problem."""


class EmptyCandidateSetError(ValueError):
    """No candidate is left once explored points are excluded."""


class DuplicatePointError(ValueError):
    """An interpolating fit received the same point twice."""


class FactorizationError(RuntimeError):
    """A matrix factorization failed even after jitter or nugget escalation."""


class ObjectiveEvaluationError(RuntimeError):
    """The objective raised during a run.

    ``trace`` holds every evaluation that completed before the failure and
    ``point`` the input that failed.
    """

    def __init__(self, message: str, trace: "RunTrace", point: Any = None):
        super().__init__(message)
        self.trace = trace
        self.point = point
