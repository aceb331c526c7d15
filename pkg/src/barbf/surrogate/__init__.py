"""Bayesian Gaussian RBF surrogate and its sampler."""

from barbf.surrogate.mcmc import (
    ChainConfig,
    ChainData,
    GibbsCache,
    HyperParams,
    OmegaBox,
    default_hyperparams,
    mh_update_mu,
    mh_update_s,
    mh_update_shared_s,
    run_chain,
    sample_beta,
    sample_gamma_indicator,
    sample_sigma2,
)
from barbf.surrogate.rbf_model import (
    PosteriorEnsemble,
    PredictionSummary,
    RbfBasis,
    SurrogateState,
    design_matrix,
    predict_sample,
    predict_summary,
    rbf_eval,
)

__all__ = [
    "ChainConfig",
    "ChainData",
    "GibbsCache",
    "HyperParams",
    "OmegaBox",
    "PosteriorEnsemble",
    "PredictionSummary",
    "RbfBasis",
    "SurrogateState",
    "default_hyperparams",
    "design_matrix",
    "mh_update_mu",
    "mh_update_s",
    "mh_update_shared_s",
    "predict_sample",
    "predict_summary",
    "rbf_eval",
    "run_chain",
    "sample_beta",
    "sample_gamma_indicator",
    "sample_sigma2",
]
