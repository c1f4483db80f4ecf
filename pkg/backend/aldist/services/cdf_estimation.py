"""
Estimators of the finite-sample cdf and worst-case error experiments.

No estimator of F(t) or G(t) can be uniformly consistent: as theta crosses
the oscillation point -t / n^{1/2} (or -t mu for G) the true cdf jumps by
Phi(t + n^{1/2} mu) - Phi(t - n^{1/2} mu) while the data barely change. The
experiments here measure how often concrete estimators miss by more than
epsilon on a grid around that point.
"""
import math
from typing import Optional, Sequence, Union

import numpy as np

from ..core.errors import DomainError
from ..core.log import get_logger
from ..core.normal import normal_interval_prob, phi_cdf_array
from ..core.rng import replication_rng
from ..core.roots import select_root
from ..core.sequences import PowerLawSequence
from ..models.asymptotics import RegimeKind, TuningRegime
from ..models.estimation import CdfEstimatorSpec, EstimatorKind, WorstCaseReport
from ..models.location import LocationModel, ScaleKind
from .asymptotics import classify_tuning
from .estimators import alasso_location_array
from .exact_dist import cdf_F, cdf_G

logger = get_logger(__name__)

# Cap on elements of a (reps, bootstrap_reps, m) index block
BOOTSTRAP_BLOCK = 4_000_000


def oscillation(n: int, mu: float, t: float) -> float:
    """Size of the jump of theta -> F_theta(t) at theta = -t / n^{1/2}."""
    m = math.sqrt(n) * mu
    return normal_interval_prob(t - m, t + m)


def oscillation_finite_delta(n: int, mu: float, t: float, delta: float) -> float:
    """|F_{theta(-delta)}(t) - F_{theta(delta)}(t)| with theta(delta) = -(t + delta) / n^{1/2}."""
    rn = math.sqrt(n)
    below = LocationModel(n=n, theta=-(t - delta) / rn, mu=mu)
    above = LocationModel(n=n, theta=-(t + delta) / rn, mu=mu)
    return abs(cdf_F(below, t) - cdf_F(above, t))


def theory_epsilon_bound(n: int, mu: float, t: float, scale: ScaleKind = ScaleKind.SQRT_N) -> float:
    """Largest epsilon for which the worst-case failure probability is bounded below by 1/2."""
    m = math.sqrt(n) * mu
    if scale is ScaleKind.SQRT_N:
        return oscillation(n, mu, t) / 2.0
    return normal_interval_prob(m * (t - 1.0), m * (t + 1.0)) / 2.0


# Pretest plug-in

class PretestEstimator:
    """
    Plug in the pointwise large-sample limit chosen by a pretest of theta = 0.

    The pretest accepts when |y_bar| <= n^(-exponent).
    """

    def __init__(self, n: int, mu: float, regime: TuningRegime, threshold_exponent: float = 0.25):
        self.n = n
        self.mu = mu
        self.regime = regime
        self.threshold = n ** (-threshold_exponent)

    def estimate_from_means(self, y_bar, t: float, scale: ScaleKind = ScaleKind.SQRT_N) -> np.ndarray:
        y = np.asarray(y_bar, dtype=float)
        rn = math.sqrt(self.n)
        x = t if scale is ScaleKind.SQRT_N else rn * self.mu * t
        accept = np.abs(y) <= self.threshold
        if self.regime.kind is RegimeKind.CONSISTENT:
            accepted = 1.0 if x >= 0 else 0.0
            safe = np.where(accept, 1.0, y)
            rejected = phi_cdf_array(x + rn * self.mu * self.mu / safe)
        else:
            accepted = float(phi_cdf_array(select_root(0.0, x, self.n * self.mu * self.mu)))
            rejected = float(phi_cdf_array(x))
        return np.where(accept, accepted, rejected)

    def estimate_many(self, data: np.ndarray, t: float, rng: np.random.Generator,
                      scale: ScaleKind = ScaleKind.SQRT_N) -> np.ndarray:
        return self.estimate_from_means(data.mean(axis=1), t, scale)


def pretest_estimator(
    sample_mean: float,
    n: int,
    mu: float,
    t: float,
    regime: TuningRegime,
    threshold_exponent: float = 0.25,
    scale: ScaleKind = ScaleKind.SQRT_N,
) -> float:
    est = PretestEstimator(n, mu, regime, threshold_exponent)
    return float(est.estimate_from_means(sample_mean, t, scale))


# m out of n bootstrap

class BootstrapEstimator:
    """m out of n bootstrap of m^{1/2}(theta_hat_m* - theta_hat_n), tuned by the same mu rule at m."""

    def __init__(self, spec: CdfEstimatorSpec, mu_of: PowerLawSequence):
        if spec.kind is not EstimatorKind.M_OUT_OF_N_BOOTSTRAP:
            raise DomainError(f"BootstrapEstimator needs kind m_out_of_n_bootstrap, got {spec.kind.value}")
        self.spec = spec
        self.mu_of = mu_of

    def estimate_many(self, data: np.ndarray, t: float, rng: np.random.Generator,
                      scale: ScaleKind = ScaleKind.SQRT_N) -> np.ndarray:
        data = np.atleast_2d(np.asarray(data, dtype=float))
        rows, n = data.shape
        m = self.spec.subsample_size
        if m >= n:
            raise DomainError(f"Subsample size m={m} must be smaller than n={n}")
        reps = self.spec.bootstrap_reps
        mu_n = float(self.mu_of.eval(n))
        mu_m = float(self.mu_of.eval(m))
        full = alasso_location_array(data.mean(axis=1), mu_n)
        factor = math.sqrt(m) if scale is ScaleKind.SQRT_N else 1.0 / mu_m

        out = np.empty(rows)
        block = max(1, BOOTSTRAP_BLOCK // (reps * m))
        for start in range(0, rows, block):
            stop = min(rows, start + block)
            idx = rng.integers(0, n, size=(stop - start, reps, m))
            sub = data[np.arange(start, stop)[:, None, None], idx].mean(axis=2)
            stat = factor * (alasso_location_array(sub, mu_m) - full[start:stop, None])
            out[start:stop] = np.mean(stat <= t, axis=1)
        return out


def bootstrap_estimator(
    data: Sequence[float],
    spec: CdfEstimatorSpec,
    mu_of: PowerLawSequence,
    t: float,
    seed: int,
    scale: ScaleKind = ScaleKind.SQRT_N,
) -> float:
    est = BootstrapEstimator(spec, mu_of)
    return float(est.estimate_many(np.asarray(data, dtype=float)[None, :], t, replication_rng(seed, 0), scale)[0])


# Worst-case experiments

def oscillation_grid(n: int, mu: float, t: float, c: float, grid_size: int = 41,
                     scale: ScaleKind = ScaleKind.SQRT_N) -> np.ndarray:
    """
    Theta grid inside (-c s, c s) packed geometrically around the oscillation point -t s.

    s is n^{-1/2} for F and mu for G. The centre itself is included.
    """
    if grid_size < 3:
        raise DomainError(f"grid_size must be >= 3, got {grid_size}")
    if not c > abs(t):
        raise DomainError(f"c={c} must exceed |t|={abs(t)}")
    s = 1.0 / math.sqrt(n) if scale is ScaleKind.SQRT_N else mu
    centre = -t * s
    reach = 0.999 * min(c - t, c + t) * s
    left = (grid_size - 1) // 2
    right = grid_size - 1 - left
    offsets_r = np.geomspace(reach, reach * 1e-6, right)
    offsets_l = np.geomspace(reach, reach * 1e-6, left)
    return np.concatenate([centre - offsets_l, [centre], centre + offsets_r[::-1]])


def trivial_estimator_tail_error(n: int, mu: float, t: float,
                                 theta_grid: Optional[Sequence[float]] = None) -> float:
    """
    sup over theta of |G(t) - 1| for t > 1, or of |G(t)| for t < -1.

    The constant estimators 1 and 0 are uniformly consistent there.
    """
    if abs(t) <= 1:
        raise DomainError(f"Trivial tails need |t| > 1, got {t}")
    if theta_grid is None:
        theta_grid = np.concatenate([mu * np.linspace(-50.0, 50.0, 2001), [-10.0, -1.0, 1.0, 10.0]])
    target = 1.0 if t > 1 else 0.0
    return max(abs(float(cdf_G(LocationModel(n=n, theta=float(th), mu=mu), t)) - target)
               for th in theta_grid)


def worst_case_experiment(
    estimator: Union[CdfEstimatorSpec, str],
    n: int,
    mu: float,
    t: float,
    c: float = 1.0,
    epsilon: float = 0.3,
    grid_size: int = 41,
    reps: int = 4000,
    seed: int = 0,
    scale: ScaleKind = ScaleKind.SQRT_N,
    mu_rule: Optional[PowerLawSequence] = None,
    regime: Optional[TuningRegime] = None,
) -> WorstCaseReport:
    """
    Estimate P_theta(|F_hat(t) - F_theta(t)| > epsilon) on the oscillation grid.

    ``mu_rule`` maps sample sizes to tuning values (needed by the bootstrap);
    without it mu is embedded as mu * (n / size)^{1/2}. The pretest reads
    its regime from ``regime`` or, failing that, from the rule.
    """
    if isinstance(estimator, str):
        estimator = CdfEstimatorSpec(kind=EstimatorKind.PRETEST_PLUGIN if estimator == "pretest"
                                     else EstimatorKind(estimator))
    if mu_rule is None:
        mu_rule = PowerLawSequence(coef=mu * math.sqrt(n), exponent=0.5)
    if regime is None:
        regime = classify_tuning(mu_rule)
    if not c > abs(t):
        raise DomainError(f"c={c} must exceed |t|={abs(t)}")
    bound = theory_epsilon_bound(n, mu, t, scale)
    if not (0 < epsilon < bound):
        raise DomainError(
            f"epsilon={epsilon} outside (0, {bound:.6f}); the lower bound is vacuous there"
        )

    if estimator.kind is EstimatorKind.PRETEST_PLUGIN:
        impl = PretestEstimator(n, mu, regime, estimator.pretest_threshold_exponent)
    else:
        impl = BootstrapEstimator(estimator, mu_rule)

    grid = oscillation_grid(n, mu, t, c, grid_size, scale)
    truth_fn = cdf_F if scale is ScaleKind.SQRT_N else cdf_G
    failures = []
    for i, theta in enumerate(grid):
        rng = replication_rng(seed, i)
        data = theta + rng.standard_normal((reps, n))
        truth = float(truth_fn(LocationModel(n=n, theta=float(theta), mu=mu), t))
        est = impl.estimate_many(data, t, rng, scale)
        failures.append(float(np.mean(np.abs(est - truth) > epsilon)))

    sup = max(failures)
    logger.info("worst_case_experiment: %s scale=%s sup failure %.4f (bound %.4f)",
                estimator.kind.value, scale.value, sup, bound)
    return WorstCaseReport(
        estimator=estimator.kind,
        scale=scale,
        n=n,
        mu=mu,
        t=t,
        c=c,
        epsilon=epsilon,
        reps=reps,
        seed=seed,
        theta_grid=[float(v) for v in grid],
        failure_prob_by_theta=failures,
        sup_failure_prob=sup,
        theory_epsilon_bound=bound,
        subsample_ratio=estimator.subsample_ratio(n),
        subsample_tuning=str(mu_rule) if estimator.kind is EstimatorKind.M_OUT_OF_N_BOOTSTRAP else None,
    )
