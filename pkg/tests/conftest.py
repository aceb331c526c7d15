"""Shared fixtures: short chains and tiny run configurations that finish in seconds."""
import numpy as np
import pytest

from barbf.config.run_config import RunConfig
from barbf.surrogate.mcmc import ChainConfig


@pytest.fixture
def short_chain():
    """60 sweeps, 24 burned, every 5th kept: 7 states."""
    return ChainConfig(n_iter=60, burn_frac=0.4, thin=5, seed=7)


@pytest.fixture
def tiny_run(short_chain):
    """Branin on the 0.04 grid with 6 initial points and 4 search iterations."""
    return RunConfig(
        problem="branin",
        method="barbf",
        n_min=6,
        n_max=10,
        chain=short_chain,
        lhd_restarts=3,
        ego_starts=2,
        seed=11,
    )


@pytest.fixture
def toy_data():
    """Eight points in the unit square with a smooth response."""
    rng = np.random.default_rng(3)
    X = rng.uniform(size=(8, 2))
    y = np.sin(3.0 * X[:, 0]) + np.cos(2.0 * X[:, 1])
    return X, y
