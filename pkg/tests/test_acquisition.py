"""Improvement criteria, candidate selection and the escape state machine."""
import numpy as np
import pytest

from barbf.acquisition.criteria import ei_gaussian, sei
from barbf.acquisition.escape import EscapeState, record_escape_point, update_escape
from barbf.acquisition.selection import (
    AcquisitionContext,
    acquisition_scores,
    export_scores,
    maximin_distance_point,
    sample_candidates_uniform,
    select_next,
)
from barbf.errors import EmptyCandidateSetError
from barbf.surrogate.rbf_model import PosteriorEnsemble, SurrogateState
from barbf.testbed.grid import Box, make_grid


def _bump_ensemble(center, height=5.0, y_mean=0.0, n_states=3):
    """States with a single positive bump at ``center``."""
    c = np.atleast_2d(center)
    states = tuple(
        SurrogateState(beta=[height + 0.1 * k], gamma=[1], sigma2=1.0, centers=c, scales=[3.0])
        for k in range(n_states)
    )
    return PosteriorEnsemble(states=states, y_mean=y_mean)


# ── criteria ─────────────────────────────────────────────────────────────────
def test_sei_values():
    assert sei([1.0, 2.0, 3.0], 2.0) == pytest.approx(1.0 / 3.0)
    assert sei([0.0, 0.5], 1.0) == 0.0
    mat = np.array([[1.0, 0.0], [3.0, 0.0]])
    np.testing.assert_allclose(sei(mat, 1.0), [1.0, 0.0])
    with pytest.raises(ValueError):
        sei(np.empty(0), 0.0)


def test_ei_closed_form_reference_values():
    assert ei_gaussian(2.0, 1.0, 2.0) == pytest.approx(0.398942, abs=1e-6)
    assert ei_gaussian(3.0, 0.0, 2.0) == 1.0
    assert ei_gaussian(1.0, 0.0, 2.0) == 0.0
    with pytest.raises(ValueError):
        ei_gaussian(0.0, -1.0, 0.0)


def test_ei_matches_monte_carlo():
    """Closed-form EI agrees with a large Monte Carlo estimate on random inputs."""
    rng = np.random.default_rng(17)
    for _ in range(20):
        mu, s0, f_max = rng.normal(), rng.uniform(0.1, 2.0), rng.normal()
        draws = np.maximum(rng.normal(mu, s0, size=1_000_000) - f_max, 0.0)
        se = draws.std(ddof=1) / np.sqrt(draws.size)
        # far-tail inputs can leave every draw at zero; 1e-6 is below the estimator's resolution
        assert abs(ei_gaussian(mu, s0, f_max) - draws.mean()) < 4 * se + 1e-6


# ── selection ────────────────────────────────────────────────────────────────
def test_select_next_picks_the_bump():
    grid = make_grid(Box.unit(2), 0.25)
    explored = np.array([[0.0, 0.0], [1.0, 1.0]])
    ctx = AcquisitionContext(grid.points, explored, [0.0, 0.5])
    sel = select_next(ctx, _bump_ensemble([0.5, 0.75]), np.random.default_rng(0))
    np.testing.assert_array_equal(sel.point, [0.5, 0.75])
    assert sel.score > 0
    assert sel.meta["ties"] == 1


def test_select_next_never_returns_explored_and_breaks_ties_with_rng():
    """A flat ensemble ties every candidate; the choice depends only on the generator."""
    grid = make_grid(Box.unit(2), 0.5)
    explored = grid.points[:3]
    flat = _bump_ensemble([0.5, 0.5], height=0.0)
    ctx = AcquisitionContext(grid.points, explored, [1.0, 2.0, 3.0])
    picks = [tuple(select_next(ctx, flat, np.random.default_rng(s)).point) for s in range(10)]
    explored_set = {tuple(p) for p in explored}
    assert not explored_set.intersection(picks)
    again = [tuple(select_next(ctx, flat, np.random.default_rng(s)).point) for s in range(10)]
    assert picks == again
    assert len(set(picks)) > 1


def test_empty_feasible_set():
    grid = make_grid(Box.unit(1), 1.0)
    ctx = AcquisitionContext(grid.points, grid.points, [0.0, 1.0])
    with pytest.raises(EmptyCandidateSetError):
        select_next(ctx, _bump_ensemble([0.5]), np.random.default_rng(0))
    with pytest.raises(EmptyCandidateSetError):
        maximin_distance_point(grid.points, grid.points)
    with pytest.raises(EmptyCandidateSetError):
        maximin_distance_point(np.empty((0, 1)), grid.points)


def test_acquisition_scores_table(tmp_path):
    grid = make_grid(Box.unit(2), 0.5)
    ctx = AcquisitionContext(grid.points, grid.points[:1], [0.0])
    frame = acquisition_scores(ctx, _bump_ensemble([1.0, 1.0]))
    assert list(frame.columns) == ["x1", "x2", "sei"]
    assert len(frame) == grid.size - 1
    assert frame["sei"].idxmax() == len(frame) - 1
    assert export_scores(frame, tmp_path / "scores.csv").is_file()


def test_maximin_distance_point():
    grid = make_grid(Box.unit(2), 0.5)
    far = maximin_distance_point(grid.points, [[0.0, 0.0]])
    np.testing.assert_array_equal(far, [1.0, 1.0])
    # four corners tie; the lexicographically first wins
    tie = maximin_distance_point(grid.points, [[0.5, 0.5]])
    np.testing.assert_array_equal(tie, [0.0, 0.0])


def test_uniform_candidates():
    box = Box([0.0, -2.0], [1.0, 2.0])
    pts = sample_candidates_uniform(box, 500, np.random.default_rng(1))
    assert pts.shape == (500, 2)
    assert np.all(pts >= box.lo) and np.all(pts <= box.hi)
    np.testing.assert_array_equal(pts, sample_candidates_uniform(box, 500, np.random.default_rng(1)))
    with pytest.raises(ValueError):
        sample_candidates_uniform(box, -1, np.random.default_rng(1))


def test_uniform_candidates_fill_every_cell():
    """10,000 iterations of 100 draws hit every cell of a 10 x 10 partition of the square."""
    rng = np.random.default_rng(21)
    hits = np.zeros((10, 10), dtype=int)
    for _ in range(10_000):
        pts = sample_candidates_uniform(Box.unit(2), 100, rng)
        cells = np.minimum((pts * 10).astype(int), 9)
        np.add.at(hits, (cells[:, 0], cells[:, 1]), 1)
    assert hits.sum() == 1_000_000
    assert np.all(hits > 0)


# ── escape ───────────────────────────────────────────────────────────────────
def test_escape_triggers_after_m_i_non_improvements():
    es = EscapeState(M_I=3, M_T=3)
    for k in range(2):
        es = update_escape(es, improved=False)
        assert not es.in_escape
    es = update_escape(es, improved=False)
    assert es.in_escape and es.c_non == 3


def test_escape_episode_adds_at_most_m_t_points():
    es = EscapeState(c_non=3, in_escape=True)
    for _ in range(3):
        es = record_escape_point(es)
        es = update_escape(es, improved=False)
    assert not es.in_escape
    assert es.c_non == 0 and es.added_this_episode == 0
    with pytest.raises(ValueError):
        record_escape_point(es)


def test_escape_resets_on_improvement():
    es = record_escape_point(EscapeState(c_non=3, in_escape=True))
    es = update_escape(es, improved=True)
    assert es == EscapeState()
    with pytest.raises(ValueError):
        EscapeState(M_I=0)
