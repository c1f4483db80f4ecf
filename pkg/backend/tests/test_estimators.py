import numpy as np
import pytest
from pydantic import ValidationError

from aldist.core.errors import ConvergenceError, DegenerateWeightError, DomainError
from aldist.core.reference import default_cv_grid
from aldist.models.regression import RegressionProblem
from aldist.services.estimators import (
    CoordinateDescentSolver,
    adaptive_penalties,
    alasso_general,
    alasso_location,
    alasso_location_array,
    alasso_objective,
    alasso_objective_location,
    cross_validate_mu,
    hard_threshold,
    least_squares,
    restricted_estimate,
    soft_threshold,
)
from aldist.services.montecarlo import build_design
from aldist.services.validation import brute_force_minimizer


@pytest.mark.parametrize("y_bar, mu, expected", [
    (0.2, 0.05, 0.1875),
    (-0.2, 0.05, -0.1875),
    (0.05, 0.05, 0.0),
    (-0.03, 0.05, 0.0),
    (1.0, 0.5, 0.75),
])
def test_alasso_location_closed_form(y_bar, mu, expected):
    assert alasso_location(y_bar, mu) == pytest.approx(expected, abs=1e-15)


def test_alasso_location_rejects_bad_mu():
    with pytest.raises(DomainError):
        alasso_location(0.3, 0.0)
    with pytest.raises(DomainError):
        alasso_location(0.3, -1.0)


def test_closed_form_minimizes_location_objective(rng):
    for y_bar, mu in zip(rng.normal(0, 1, 300), rng.uniform(0.01, 1.0, 300)):
        est = alasso_location(y_bar, mu)
        candidates = np.concatenate([rng.uniform(-3, 3, 400), [0.0, y_bar]])
        best = alasso_objective_location(est, y_bar, mu)
        assert np.all(alasso_objective_location(candidates, y_bar, mu) >= best - 1e-12)


def test_hard_threshold_identity(rng):
    for y_bar, mu in zip(rng.normal(0, 1, 500), rng.uniform(0.01, 1.0, 500)):
        h = hard_threshold(y_bar, mu)
        rhs = 0.0 if h == 0 else h - np.sign(h) * mu ** 2 / abs(y_bar)
        assert alasso_location(y_bar, mu) == pytest.approx(rhs, abs=1e-14)


def test_array_version_matches_scalar(rng):
    y_bar = rng.normal(0, 0.3, 200)
    arr = alasso_location_array(y_bar, 0.1)
    assert np.allclose(arr, [alasso_location(v, 0.1) for v in y_bar], rtol=0, atol=1e-15)


@pytest.mark.parametrize("z, lam, expected", [(2.0, 0.5, 1.5), (-2.0, 0.5, -1.5), (0.3, 0.5, 0.0)])
def test_soft_threshold(z, lam, expected):
    assert soft_threshold(z, lam) == expected


def test_orthogonal_design_reduces_to_closed_form(orthogonal_problem):
    fit = alasso_general(orthogonal_problem, 0.15)
    expected = [alasso_location(v, 0.15) for v in fit.ls_estimate]
    assert np.allclose(fit.estimate, expected, atol=1e-8)
    assert np.array_equal(fit.active_set, fit.estimate != 0)


def test_solver_matches_sign_pattern_brute_force():
    rng = np.random.default_rng(3)
    design = build_design(100, 2, 0.5)
    for _ in range(8):
        y = design @ np.array([1.0, 0.1]) + rng.standard_normal(100)
        problem = RegressionProblem(design=design, response=y)
        fit = alasso_general(problem, 0.1)
        assert np.allclose(fit.estimate, brute_force_minimizer(problem, 0.1), atol=1e-6)


def test_objective_trace_is_monotone(correlated_problem):
    fit = alasso_general(correlated_problem, 0.2)
    trace = np.asarray(fit.objective_trace)
    assert np.all(np.diff(trace) <= 1e-9 * max(1.0, trace[0]))
    assert fit.objective == pytest.approx(alasso_objective(correlated_problem, fit.estimate, 0.2), rel=1e-10)


def test_general_fit_beats_perturbations(correlated_problem, rng):
    fit = alasso_general(correlated_problem, 0.2)
    best = alasso_objective(correlated_problem, fit.estimate, 0.2)
    for _ in range(50):
        other = fit.estimate + rng.normal(0, 0.05, fit.estimate.size)
        assert alasso_objective(correlated_problem, other, 0.2) >= best - 1e-9


def test_large_mu_zeroes_everything(correlated_problem):
    fit = alasso_general(correlated_problem, 50.0)
    assert not fit.active_set.any()


def test_degenerate_weights_raise():
    with pytest.raises(DegenerateWeightError):
        adaptive_penalties(np.array([1.0, 0.0]), 100, 0.1)


def test_convergence_error_carries_last_iterate(correlated_problem):
    x, y = correlated_problem.design, correlated_problem.response
    ls = least_squares(correlated_problem)
    solver = CoordinateDescentSolver(tol=1e-300, max_iter=2)
    with pytest.raises(ConvergenceError) as info:
        solver.solve(x.T @ x, x.T @ y, adaptive_penalties(ls, 100, 0.2), ls)
    assert info.value.iterations == 2
    assert info.value.last_iterate.shape == (4,)


def test_restricted_estimate_is_zero(correlated_problem):
    assert np.array_equal(restricted_estimate(correlated_problem), np.zeros(4))


def test_rank_deficient_design_rejected():
    x = np.ones((10, 2))
    with pytest.raises(ValidationError):
        RegressionProblem(design=x, response=np.zeros(10))


def test_cross_validation_is_seeded(correlated_problem):
    grid = np.logspace(-2, 0, 9)
    a = cross_validate_mu(correlated_problem, folds=5, grid=grid, seed=11)
    b = cross_validate_mu(correlated_problem, folds=5, grid=grid, seed=11)
    assert a == b
    assert a in set(grid)


def test_cross_validation_singleton_and_errors(correlated_problem):
    assert cross_validate_mu(correlated_problem, grid=[0.3]) == 0.3
    with pytest.raises(DomainError):
        cross_validate_mu(correlated_problem, grid=[])
    with pytest.raises(DomainError):
        cross_validate_mu(correlated_problem, folds=1)


def _study_problem(theta, seed):
    design = build_design(100, 4, 0.5)
    noise = np.random.default_rng(seed).standard_normal(100)
    return RegressionProblem(design=design, response=design @ np.asarray(theta) + noise)


@pytest.mark.slow
def test_cross_validation_prefers_sparse_fits_under_pure_noise():
    grid = default_cv_grid()
    median = float(np.median(grid))
    chosen = [cross_validate_mu(_study_problem([0.0] * 4, s), folds=10, grid=grid, seed=s) for s in range(100)]
    assert sum(mu >= median for mu in chosen) >= 80


@pytest.mark.slow
def test_cross_validation_optimum_is_interior_with_strong_signal():
    grid = default_cv_grid()
    chosen = [cross_validate_mu(_study_problem([3.0, 1.5, 0.0, 0.0], s), folds=10, grid=grid, seed=s)
              for s in range(20)]
    assert max(chosen) < max(grid)
    assert sum(min(grid) < mu < max(grid) for mu in chosen) >= 15
