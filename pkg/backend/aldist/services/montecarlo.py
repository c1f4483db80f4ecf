"""
Monte Carlo study of the adaptive LASSO under a correlated design.

The design stacks d = n / k copies of a k x k block so that X'X = n Omega with
Omega_ij = rho^|i-j|. Noise is redrawn every replication from a counter-based
stream; the design stays fixed.
"""
import math
from typing import Optional, Sequence

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from scipy import linalg, stats

from ..core.errors import ALDistError, DegenerateBandwidthError, DomainError
from ..core.log import get_logger
from ..core.rng import child_seed, replication_rng
from ..core.sequences import PowerLawSequence
from ..models.regression import RegressionProblem
from ..models.study import MarginalSummary, StudyConfig, StudyResult, TuningChoice, TuningKind
from .estimators import alasso_general, cross_validate_mu

logger = get_logger(__name__)

KDE_GRID_POINTS = 512
KDE_TAIL_BANDWIDTHS = 3.0


def toeplitz_correlation(k: int, rho: float) -> np.ndarray:
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if not abs(rho) < 1:
        raise DomainError(f"|rho| must be < 1 for a positive definite Omega, got {rho}")
    return linalg.toeplitz(rho ** np.arange(k))


def cholesky_factor(k: int, rho: float) -> np.ndarray:
    """Lower-triangular L with L L' = Omega."""
    omega = toeplitz_correlation(k, rho)
    try:
        return np.linalg.cholesky(omega)
    except np.linalg.LinAlgError as e:
        raise DomainError(f"Omega is not positive definite for rho={rho}") from e


def build_design(n: int, k: int, rho: float) -> np.ndarray:
    """Stack d = n / k copies of k^{1/2} L', so that X'X = d k L L' = n Omega."""
    if k < 1 or n % k != 0:
        raise DomainError(f"n={n} must be divisible by k={k}")
    block = math.sqrt(k) * cholesky_factor(k, rho).T
    return np.tile(block, (n // k, 1))


def scaling_constants(n: int, k: int, rho: float) -> np.ndarray:
    """C_jj^{-1/2} with C = (n Omega)^{-1}."""
    if k < 1 or n % k != 0:
        raise DomainError(f"n={n} must be divisible by k={k}")
    omega_inv = np.linalg.inv(toeplitz_correlation(k, rho))
    return np.sqrt(n / np.diag(omega_inv))


def silverman_bandwidth(values: np.ndarray) -> float:
    """0.9 min(sd, IQR / 1.34) m^{-1/5}; falls back to sd when the IQR is zero."""
    m = values.size
    if m < 2:
        raise DegenerateBandwidthError(f"Need at least two values for a bandwidth, got {m}")
    sd = float(np.std(values, ddof=1))
    if sd == 0:
        raise DegenerateBandwidthError("All values are identical; bandwidth would be zero")
    q75, q25 = np.percentile(values, [75, 25])
    spread = min(sd, (q75 - q25) / 1.34)
    if spread <= 0:
        spread = sd
    return 0.9 * spread * m ** (-0.2)


def kde_smooth(values: Sequence[float], mass_scale: float = 1.0,
               grid_points: int = KDE_GRID_POINTS) -> tuple[np.ndarray, np.ndarray]:
    """Gaussian kernel density on a grid spanning the data range +/- 3 bandwidths, times mass_scale."""
    vals = np.asarray(values, dtype=float).reshape(-1)
    if vals.size == 0:
        raise DomainError("kde_smooth needs at least one value")
    if not (0.0 <= mass_scale <= 1.0):
        raise DomainError(f"mass_scale must lie in [0, 1], got {mass_scale}")
    h = silverman_bandwidth(vals)
    kde = stats.gaussian_kde(vals, bw_method=h / float(np.std(vals, ddof=1)))
    x = np.linspace(vals.min() - KDE_TAIL_BANDWIDTHS * h, vals.max() + KDE_TAIL_BANDWIDTHS * h, grid_points)
    return x, kde(x) * mass_scale


# Replications

def _fit_replication(index: int, config: StudyConfig, design: np.ndarray, theta: np.ndarray):
    rng = replication_rng(config.seed, index)
    response = design @ theta + rng.standard_normal(config.n)
    # drawn after the noise so fixed and CV runs see identical data
    cv_seed = child_seed(rng)
    try:
        problem = RegressionProblem(design=design, response=response)
        if config.tuning.kind is TuningKind.FIXED:
            mu = float(config.tuning.mu_rule.eval(config.n))
        else:
            mu = cross_validate_mu(problem, config.tuning.folds, config.tuning.grid, seed=cv_seed)
        fit = alasso_general(problem, mu)
    except ALDistError as e:
        logger.warning("Replication %d failed: %s", index, e)
        return index, None, None
    return index, fit.estimate.tolist(), mu


def _summarize_component(j: int, config: StudyConfig, theta: float, const: float,
                         column: np.ndarray) -> MarginalSummary:
    reps = column.size
    zero = column == 0.0
    zero_count = int(zero.sum())
    freq = zero_count / reps if reps else 0.0
    nonzero = const * (column[~zero] - theta)
    kde_x = kde_density = None
    if config.kde and nonzero.size >= 2:
        try:
            x, dens = kde_smooth(nonzero, 1.0 - freq)
            kde_x, kde_density = x.tolist(), dens.tolist()
        except DegenerateBandwidthError as e:
            logger.info("Component %d: no smoothing (%s)", j + 1, e)
    return MarginalSummary(
        component=j + 1,
        theta=theta,
        scaling_constant=const,
        replications=reps,
        zero_count=zero_count,
        zero_frequency=freq,
        atom_location=-const * theta,
        nonzero_values=nonzero.tolist(),
        median_nonzero=float(np.median(nonzero)) if nonzero.size else None,
        kde_x=kde_x,
        kde_density=kde_density,
    )


def run_study(config: StudyConfig, threads: int = 1) -> StudyResult:
    design = build_design(config.n, config.k, config.rho)
    theta = config.theta_vector()
    consts = scaling_constants(config.n, config.k, config.rho)

    logger.info("run_study: n=%d k=%d rho=%g gamma=%g tuning=%s reps=%d",
                config.n, config.k, config.rho, config.gamma, config.tuning.describe(), config.replications)
    outcomes = Parallel(n_jobs=max(1, int(threads)))(
        delayed(_fit_replication)(i, config, design, theta) for i in range(config.replications)
    )
    outcomes.sort(key=lambda r: r[0])

    estimates = [est for _, est, _ in outcomes]
    mu_used = [mu for _, _, mu in outcomes]
    ok = np.array([est for est in estimates if est is not None], dtype=float).reshape(-1, config.k)
    failures = sum(est is None for est in estimates)
    if failures:
        logger.warning("run_study: %d of %d replications failed", failures, config.replications)

    summaries = [
        _summarize_component(j, config, float(theta[j]), float(consts[j]), ok[:, j])
        for j in range(config.k)
    ]
    return StudyResult(
        config=config,
        theta=theta.tolist(),
        scaling_constants=consts.tolist(),
        summaries=summaries,
        estimates=estimates,
        mu_used=mu_used,
        failures=failures,
    )


def zero_frequency_by_mu(config: StudyConfig, mu_grid: Sequence[float], threads: int = 1) -> pd.DataFrame:
    """Zero frequencies per component for a sweep of fixed mu on common seeds."""
    rows = []
    for mu in sorted(mu_grid):
        tuning = TuningChoice(kind=TuningKind.FIXED, mu_rule=PowerLawSequence(coef=float(mu), exponent=0.0))
        result = run_study(config.model_copy(update={"tuning": tuning, "kde": False}), threads)
        row = {"mu": float(mu)}
        row.update({f"zero_frequency_{s.component}": s.zero_frequency for s in result.summaries})
        rows.append(row)
    return pd.DataFrame(rows)


# Output tables

def component_frame(result: StudyResult, component: int) -> pd.DataFrame:
    """Per-replication rows for one 1-based component; failed replications are left out."""
    j = component - 1
    theta = result.theta[j]
    const = result.scaling_constants[j]
    rows = []
    for i, (est, mu) in enumerate(zip(result.estimates, result.mu_used)):
        if est is None:
            continue
        value = est[j]
        rows.append({
            "replication": i,
            "estimate": value,
            "centered_scaled": const * (value - theta),
            "is_zero": int(value == 0.0),
            "mu_used": mu,
        })
    return pd.DataFrame(rows, columns=["replication", "estimate", "centered_scaled", "is_zero", "mu_used"])


def study_summary(result: StudyResult) -> dict:
    return {
        "theta": result.theta,
        "scaling_constants": result.scaling_constants,
        "failures": result.failures,
        "median_mu_used": result.median_mu(),
        "components": [s.model_dump() for s in result.summaries],
    }


def study_frames(result: StudyResult) -> dict[int, pd.DataFrame]:
    return {s.component: component_frame(result, s.component) for s in result.summaries}


def cv_below_fixed_share(result: StudyResult, fixed_mu: Optional[float] = None) -> Optional[float]:
    """Share of replications whose selected mu lies below the fixed rule value (default n^{-1/3})."""
    fixed = result.config.n ** (-1.0 / 3.0) if fixed_mu is None else fixed_mu
    used = [m for m in result.mu_used if m is not None]
    if not used:
        return None
    return float(np.mean(np.asarray(used) < fixed))
