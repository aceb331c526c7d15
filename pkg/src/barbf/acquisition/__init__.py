"""Acquisition criteria, candidate handling and the escape step."""

from barbf.acquisition.criteria import ei_gaussian, sei
from barbf.acquisition.escape import EscapeState, record_escape_point, update_escape
from barbf.acquisition.selection import (
    AcquisitionContext,
    Selection,
    acquisition_scores,
    export_scores,
    maximin_distance_point,
    sample_candidates_uniform,
    select_next,
)

__all__ = [
    "AcquisitionContext",
    "EscapeState",
    "Selection",
    "acquisition_scores",
    "ei_gaussian",
    "export_scores",
    "maximin_distance_point",
    "record_escape_point",
    "sample_candidates_uniform",
    "select_next",
    "sei",
    "update_escape",
]
