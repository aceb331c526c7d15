"""Escape step: leave a stagnant region by inserting space-filling points.

After ``M_I`` consecutive iterations without improvement the search switches
to escape mode and adds maximin-distance points until the incumbent improves
or ``M_T`` points have been added, then returns to SEI selection.
"""
from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class EscapeState:
    c_non: int = 0
    M_I: int = 3
    M_T: int = 3
    in_escape: bool = False
    added_this_episode: int = 0

    def __post_init__(self):
        if self.M_I < 1 or self.M_T < 1:
            raise ValueError(f"escape thresholds must be >= 1 (got M_I={self.M_I}, M_T={self.M_T})")
        if self.c_non < 0 or not 0 <= self.added_this_episode <= self.M_T:
            raise ValueError(f"invalid escape counters: c_non={self.c_non}, added={self.added_this_episode}")


def update_escape(es: EscapeState, improved: bool) -> EscapeState:
    """Advance the escape state after one evaluation.

    Any improvement resets the counter and ends an episode. An episode that
    has added ``M_T`` points without improvement also ends, with the counter
    restarted.
    """
    if improved:
        return replace(es, c_non=0, in_escape=False, added_this_episode=0)
    c_non = es.c_non + 1
    if es.in_escape:
        if es.added_this_episode >= es.M_T:
            return replace(es, c_non=0, in_escape=False, added_this_episode=0)
        return replace(es, c_non=c_non)
    if c_non >= es.M_I:
        return replace(es, c_non=c_non, in_escape=True, added_this_episode=0)
    return replace(es, c_non=c_non)


def record_escape_point(es: EscapeState) -> EscapeState:
    """Count one escape point added in the current episode."""
    if not es.in_escape:
        raise ValueError("cannot add an escape point outside escape mode")
    if es.added_this_episode >= es.M_T:
        raise ValueError(f"escape episode already added {es.M_T} points")
    return replace(es, added_this_episode=es.added_this_episode + 1)
