"""Run configuration defaults, validation, experiment files and presets."""
import json
from dataclasses import replace

import pytest

from barbf.config.presets import load_preset, preset_names
from barbf.config.run_config import GRID, UNIFORM, Experiment, RunConfig
from barbf.config.schema import RunConfigSchema, experiment_from_dict, format_errors, load_experiment
from barbf.config.validator import validate_run_config
from barbf.surrogate.mcmc import ChainConfig
from barbf.testbed.problems import get_problem


def test_defaults_follow_the_problem():
    cfg = RunConfig()
    branin = get_problem("branin")
    assert validate_run_config(cfg) == []
    assert cfg.resolved_candidate_mode(branin) == GRID
    assert cfg.resolved_grid_step(branin) == 0.04
    assert cfg.resolved_c(branin) == 25.0
    assert replace(cfg, c_slab=5.0).resolved_c(branin) == 5.0
    assert cfg.chain == ChainConfig()

    rastrigin = get_problem("rastrigin:8")
    assert cfg.resolved_candidate_mode(rastrigin) == UNIFORM
    assert replace(cfg, method="barbf-gridfree").resolved_candidate_mode(branin) == UNIFORM
    assert cfg.with_seed(3).seed == 3


def test_validator_collects_every_issue():
    cfg = RunConfig(
        problem="nowhere",
        method="simplex",
        n_min=1,
        n_max=1,
        c_slab=-1.0,
        escape_m_i=0,
        lhd_restarts=0,
        ego_starts=0,
        loo_scales=(),
        hyper_overrides={"C": 3.0, "omega_mix": 2.0, "b_s": -1.0, "nu0": 0.0},
    )
    issues = validate_run_config(cfg)
    text = "\n".join(issues)
    for fragment in (
        "unknown problem",
        "method 'simplex'",
        "n_min must be >= 2",
        "n_max must exceed n_min",
        "c_slab",
        "escape thresholds",
        "lhd_restarts",
        "ego_starts",
        "loo_scales must not be empty",
        "hyper_overrides.C unknown",
        "omega_mix must lie in [0, 1]",
        "b_s must be >= 0",
        "nu0 must be > 0",
    ):
        assert fragment in text, fragment


def test_validator_grid_checks():
    assert any("does not divide" in i for i in validate_run_config(RunConfig(grid_step=0.03)))
    assert any("cannot hold" in i for i in validate_run_config(RunConfig(grid_step=0.5, n_min=4, n_max=12)))
    assert any("has no grid" in i for i in validate_run_config(RunConfig(problem="rastrigin:2", candidate_mode="grid")))
    assert any("n_candidates" in i for i in validate_run_config(RunConfig(problem="rastrigin:2", n_candidates=0)))
    assert any("candidate_mode" in i for i in validate_run_config(RunConfig(candidate_mode="sobol")))


def test_experiment_schema_loads_nested_config():
    exp = experiment_from_dict(
        {
            "name": "x",
            "reps": 4,
            "seed": 9,
            "run": {
                "problem": "ronkkonen2",
                "method": "ego",
                "n_min": 10,
                "n_max": 20,
                "chain": {"n_iter": 500, "update_s_mode": "per-basis-s"},
                "loo_scales": [1.0, 2.0],
                "hyper_overrides": {"sigma2_s": 0.2},
            },
        }
    )
    assert isinstance(exp, Experiment) and exp.reps == 4 and exp.seed == 9
    assert exp.run.chain.n_iter == 500 and exp.run.chain.update_s_mode == "per-basis-s"
    assert exp.run.chain.burn_frac == 0.4
    assert exp.run.loo_scales == (1.0, 2.0)
    assert exp.run.hyper_overrides == {"sigma2_s": 0.2}


def test_experiment_schema_rejects_bad_input():
    with pytest.raises(ValueError, match="run.chain.n_itr"):
        experiment_from_dict({"run": {"chain": {"n_itr": 5}}})
    with pytest.raises(ValueError, match="run.n_max"):
        experiment_from_dict({"run": {"n_min": 10, "n_max": 10}})
    with pytest.raises(ValueError, match="run"):
        experiment_from_dict({"reps": 2})
    with pytest.raises(ValueError, match="method"):
        experiment_from_dict({"run": {"method": "simplex"}})


def test_format_errors_flattens_nested_messages():
    assert format_errors({"run": {"chain": {"thin": ["bad"]}}, "reps": ["low"]}) == ["run.chain.thin: bad", "reps: low"]


def test_load_experiment_file(tmp_path):
    path = tmp_path / "exp.json"
    path.write_text(json.dumps({"reps": 2, "run": {"problem": "branin", "n_min": 5, "n_max": 9}}))
    exp = load_experiment(path)
    assert exp.run.n_max == 9 and exp.reps == 2
    (tmp_path / "broken.json").write_text("{not json")
    with pytest.raises(ValueError, match="not valid JSON"):
        load_experiment(tmp_path / "broken.json")
    with pytest.raises(ValueError, match="could not read"):
        load_experiment(tmp_path / "missing.json")


def test_schema_dump_reloads():
    cfg = RunConfig(problem="hartmann4", grid_step=0.05, c_slab=10.0, loo_scales=(0.5, 1.0))
    dumped = RunConfigSchema().dump(cfg)
    assert RunConfigSchema().load(dumped) == replace(cfg, chain=ChainConfig())


def test_every_preset_is_valid():
    names = preset_names()
    assert "branin-barbf-desk" in names and "rastrigin8-smoke" in names
    for name in names:
        exp = load_preset(name)
        assert exp.name == name
        assert validate_run_config(exp.run) == [], name


def test_desk_presets_settings():
    exp = load_preset("branin-barbf-desk")
    assert (exp.run.n_min, exp.run.n_max, exp.run.chain.n_iter, exp.reps) == (16, 46, 2000, 20)
    smoke = load_preset("rastrigin8-smoke")
    assert smoke.run.method == "barbf-gridfree" and smoke.run.n_max - smoke.run.n_min == 60
    with pytest.raises(ValueError, match="unknown preset"):
        load_preset("nope")


def test_fine_grid_presets_match_the_coarse_study():
    """The 0.02-grid presets run as many replications as the 0.04-grid Branin study."""
    coarse = load_preset("branin-barbf")
    for name, iterations in (("branin-fine-120", 120), ("branin-fine-30", 30)):
        exp = load_preset(name)
        assert exp.reps == coarse.reps == 60, name
        assert exp.run.grid_step == 0.02
        assert exp.run.n_max - exp.run.n_min == iterations
