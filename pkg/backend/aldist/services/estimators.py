"""
Adaptive LASSO estimators.

Closed forms for the orthogonal/location case, a cyclic coordinate-descent
solver for general designs and K-fold cross-validated tuning.
"""
import math
from typing import Optional, Sequence

import numpy as np
from sklearn.model_selection import KFold

from ..core.config import load_settings
from ..core.errors import ConvergenceError, DegenerateWeightError, DomainError
from ..core.log import get_logger
from ..core.reference import default_cv_grid
from ..models.regression import AdaptiveLassoFit, RegressionProblem

logger = get_logger(__name__)

LS_ZERO_TOL = 1e-12
TIE_RTOL = 1e-12


def _check_mu(mu: float) -> float:
    mu = float(mu)
    if not (mu > 0 and math.isfinite(mu)):
        raise DomainError(f"mu must be positive and finite, got {mu}")
    return mu


# Location / orthogonal case

def alasso_location(y_bar: float, mu: float) -> float:
    """Closed-form minimizer: 0 if |y_bar| <= mu else y_bar - mu^2 / y_bar."""
    mu = _check_mu(mu)
    y_bar = float(y_bar)
    if abs(y_bar) <= mu:
        return 0.0
    return y_bar - mu * mu / y_bar


def alasso_location_array(y_bar, mu: float) -> np.ndarray:
    mu = _check_mu(mu)
    y = np.asarray(y_bar, dtype=float)
    keep = np.abs(y) > mu
    safe = np.where(keep, y, 1.0)
    return np.where(keep, y - mu * mu / safe, 0.0)


def hard_threshold(y_bar: float, mu: float) -> float:
    mu = _check_mu(mu)
    y_bar = float(y_bar)
    return 0.0 if abs(y_bar) <= mu else y_bar


def alasso_objective_location(theta: float, y_bar: float, mu: float, n: int = 1):
    """n (y_bar - theta)^2 + 2 n mu^2 |theta| / |y_bar|; theta may be an array."""
    theta = np.asarray(theta, dtype=float)
    return n * (y_bar - theta) ** 2 + 2.0 * n * mu * mu * np.abs(theta) / abs(y_bar)


# General design

def soft_threshold(z: float, lam: float) -> float:
    if z > lam:
        return z - lam
    if z < -lam:
        return z + lam
    return 0.0


def least_squares(problem: RegressionProblem) -> np.ndarray:
    coef, *_ = np.linalg.lstsq(problem.design, problem.response, rcond=None)
    return coef


def restricted_estimate(problem: RegressionProblem) -> np.ndarray:
    """The fully restricted estimator theta_R = 0."""
    return np.zeros(problem.k)


def adaptive_penalties(ls: np.ndarray, n: int, mu: float) -> np.ndarray:
    """Per-coordinate soft-threshold levels n mu^2 / |theta_LS,i|."""
    small = np.abs(ls) <= LS_ZERO_TOL
    if np.any(small):
        idx = [int(i) + 1 for i in np.flatnonzero(small)]
        raise DegenerateWeightError(
            f"Least-squares coefficient(s) {idx} are zero within {LS_ZERO_TOL:g}; adaptive weights undefined"
        )
    return n * mu * mu / np.abs(ls)


def alasso_objective(problem: RegressionProblem, theta, mu: float) -> float:
    """(Y - X theta)'(Y - X theta) + 2 n mu^2 sum |theta_i| / |theta_LS,i|."""
    theta = np.asarray(theta, dtype=float)
    resid = problem.response - problem.design @ theta
    pen = adaptive_penalties(least_squares(problem), problem.n, mu)
    return float(resid @ resid + 2.0 * np.sum(pen * np.abs(theta)))


class CoordinateDescentSolver:
    """Cyclic coordinate descent for weighted-l1 penalized least squares in Gram form."""

    def __init__(self, tol: Optional[float] = None, max_iter: Optional[int] = None):
        settings = load_settings()
        self.tol = settings.solver_tol if tol is None else float(tol)
        self.max_iter = settings.solver_max_iter if max_iter is None else int(max_iter)
        if not self.tol > 0:
            raise DomainError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise DomainError(f"max_iter must be >= 1, got {self.max_iter}")

    @staticmethod
    def objective(gram: np.ndarray, xty: np.ndarray, yty: float,
                  penalties: np.ndarray, theta: np.ndarray) -> float:
        return float(yty - 2.0 * xty @ theta + theta @ gram @ theta + 2.0 * penalties @ np.abs(theta))

    def solve(self, gram: np.ndarray, xty: np.ndarray, penalties: np.ndarray,
              start: np.ndarray, yty: Optional[float] = None) -> tuple[np.ndarray, int, list[float]]:
        """
        Minimize theta' G theta - 2 c' theta + 2 sum_i lam_i |theta_i|.

        Returns (theta, cycles, objective trace). The trace is only filled
        when yty is given.
        """
        k = gram.shape[0]
        theta = np.array(start, dtype=float, copy=True)
        diag = np.diag(gram).copy()
        trace: list[float] = []
        if yty is not None:
            trace.append(self.objective(gram, xty, yty, penalties, theta))

        for cycle in range(1, self.max_iter + 1):
            max_change = 0.0
            for j in range(k):
                old = theta[j]
                partial = xty[j] - gram[j] @ theta + diag[j] * old
                new = soft_threshold(partial, penalties[j]) / diag[j]
                if new != old:
                    theta[j] = new
                    max_change = max(max_change, abs(new - old))
            if yty is not None:
                trace.append(self.objective(gram, xty, yty, penalties, theta))
            if max_change < self.tol:
                return theta, cycle, trace

        raise ConvergenceError(
            f"Coordinate descent did not converge in {self.max_iter} cycles",
            last_iterate=theta,
            iterations=self.max_iter,
        )


def alasso_general(
    problem: RegressionProblem,
    mu: float,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
) -> AdaptiveLassoFit:
    """Adaptive LASSO for a general full-rank design, warm-started at least squares."""
    mu = _check_mu(mu)
    ls = least_squares(problem)
    penalties = adaptive_penalties(ls, problem.n, mu)
    x, y = problem.design, problem.response
    solver = CoordinateDescentSolver(tol, max_iter)
    theta, cycles, trace = solver.solve(x.T @ x, x.T @ y, penalties, ls, yty=float(y @ y))
    logger.debug("alasso_general: mu=%g converged in %d cycles", mu, cycles)
    return AdaptiveLassoFit(
        estimate=theta,
        ls_estimate=ls,
        active_set=theta != 0,
        mu=mu,
        iterations=cycles,
        objective_trace=trace,
    )


def cross_validate_mu(
    problem: RegressionProblem,
    folds: int = 10,
    grid: Optional[Sequence[float]] = None,
    seed: int = 0,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
) -> float:
    """
    Pick mu by K-fold cross-validation of the mean squared prediction error.

    Folds are a seeded random partition. Each training fold uses its own
    least-squares weights; the grid is walked from the largest mu down with
    warm starts. Ties go to the larger mu.
    """
    if grid is None:
        grid = default_cv_grid()
    values = sorted({_check_mu(g) for g in grid}, reverse=True)
    if not values:
        raise DomainError("Cross-validation grid is empty")
    if folds < 2:
        raise DomainError(f"folds must be >= 2, got {folds}")
    if folds > problem.n:
        raise DomainError(f"folds={folds} exceeds the sample size {problem.n}")
    if len(values) == 1:
        return values[0]

    solver = CoordinateDescentSolver(tol, max_iter)
    x, y = problem.design, problem.response
    errors = np.zeros(len(values))
    splitter = KFold(n_splits=folds, shuffle=True, random_state=int(seed) % (2**32))

    for train, test in splitter.split(x):
        x_tr, y_tr = x[train], y[train]
        x_te, y_te = x[test], y[test]
        ls, *_ = np.linalg.lstsq(x_tr, y_tr, rcond=None)
        gram, xty = x_tr.T @ x_tr, x_tr.T @ y_tr
        n_tr = x_tr.shape[0]
        theta = ls
        for i, mu in enumerate(values):
            theta, _, _ = solver.solve(gram, xty, adaptive_penalties(ls, n_tr, mu), theta)
            resid = y_te - x_te @ theta
            errors[i] += float(resid @ resid) / len(test)

    errors /= folds
    best = errors.min()
    # values are descending, so the first near-minimal entry is the largest mu
    chosen = next(mu for mu, err in zip(values, errors) if err <= best + TIE_RTOL * max(1.0, abs(best)))
    logger.debug("cross_validate_mu: chose mu=%g (cv error %g) over %d grid points", chosen, best, len(values))
    return chosen
