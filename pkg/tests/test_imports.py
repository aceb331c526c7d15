"""Import smoke test for the public package surface."""
import importlib

import pytest

MODULES = [
    "barbf",
    "barbf.cli",
    "barbf.env",
    "barbf.main",
    "barbf.errors",
    "barbf.config",
    "barbf.testbed",
    "barbf.design",
    "barbf.surrogate",
    "barbf.acquisition",
    "barbf.baselines",
    "barbf.optimizer",
    "barbf.results",
    "barbf.parallelization",
]


@pytest.mark.parametrize("name", MODULES)
def test_module_imports(name):
    assert importlib.import_module(name) is not None


def test_version_string():
    import barbf

    assert isinstance(barbf.__version__, str) and barbf.__version__
