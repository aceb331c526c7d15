"""Comparison optimizers: interpolating RBF with weight cycling, and kriging with EI."""

from barbf.baselines.ego import GpModel, ego_fit, ego_select
from barbf.baselines.gmsrbf import GmsrbfModel, WeightCycle, choose_scale_loo, gmsrbf_fit, gmsrbf_select, loo_cost

__all__ = [
    "GmsrbfModel",
    "GpModel",
    "WeightCycle",
    "choose_scale_loo",
    "ego_fit",
    "ego_select",
    "gmsrbf_fit",
    "gmsrbf_select",
    "loo_cost",
]
