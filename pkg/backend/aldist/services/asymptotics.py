"""
Regime classification and limit laws of the adaptive LASSO.

mu_n is a power law c n^(-alpha); theta_n a finite sum of signed power laws.
Every limit used below (m, rho, nu, zeta, r, q) is computed exactly from the
exponents and coefficients, never by evaluating at a large n.
"""
import math
from typing import Optional, Sequence

import numpy as np

from ..core.errors import DomainError, InconsistentTuningError, UnresolvedCaseError
from ..core.extended import ExtendedReal
from ..core.log import get_logger
from ..core.normal import normal_interval_prob, phi_cdf, phi_cdf_array
from ..core.rng import replication_rng
from ..core.sequences import (
    EXPONENT_TOL,
    LimitForm,
    PowerLawSequence,
    ThetaSequence,
    limit_of,
    power_sum_limit,
    scale_terms,
)
from ..models.asymptotics import LimitDistribution, RegimeKind, SelectionLimit, TuningRegime
from ..models.location import LocationModel, ScaleKind
from .estimators import alasso_location_array
from .exact_dist import cdf_F, cdf_F_left, cdf_G, roots

logger = get_logger(__name__)

KNIFE_EDGE_TOL = 1e-12


# Sequence limits

def sqrt_n_limit(theta_seq: ThetaSequence) -> ExtendedReal:
    """nu = lim n^{1/2} theta_n."""
    return limit_of(theta_seq, form=LimitForm.SQRT_N_SCALED)


def zeta_limit(mu_seq: PowerLawSequence, theta_seq: ThetaSequence) -> ExtendedReal:
    """zeta = lim theta_n / mu_n."""
    return limit_of(theta_seq, mu_seq, LimitForm.RATIO)


def knife_edge_shift(mu_seq: PowerLawSequence, theta_seq: ThetaSequence, zeta: float) -> ExtendedReal:
    """r = lim n^{1/2} (mu_n - zeta theta_n) for |zeta| = 1."""
    terms = mu_seq.terms() + scale_terms(theta_seq.terms(), -zeta, 0.0)
    return power_sum_limit(scale_terms(terms, 1.0, -0.5))


def oracle_shift(mu_seq: PowerLawSequence, theta_seq: ThetaSequence) -> ExtendedReal:
    """q = lim n^{1/2} mu_n^2 / theta_n."""
    numerator = PowerLawSequence(coef=mu_seq.coef ** 2, exponent=2.0 * mu_seq.exponent - 0.5)
    return limit_of(numerator, theta_seq, LimitForm.RATIO)


def _is_unit(zeta: ExtendedReal) -> bool:
    if not zeta.is_finite:
        return False
    gap = abs(abs(zeta.value) - 1.0)
    if gap == 0.0:
        return True
    if gap <= KNIFE_EDGE_TOL:
        raise UnresolvedCaseError(
            f"|zeta| = {abs(zeta.value)!r} is within {KNIFE_EDGE_TOL:g} of 1 but not exactly 1"
        )
    return False


# Classification

def classify_tuning(mu_seq: PowerLawSequence) -> TuningRegime:
    if mu_seq.exponent <= 0:
        raise InconsistentTuningError(
            f"mu_n = {mu_seq} does not tend to zero (alpha = {mu_seq.exponent!r}); "
            "the estimator is not consistent"
        )
    m = limit_of(mu_seq, form=LimitForm.SQRT_N_SCALED)
    rho = power_sum_limit([(mu_seq.coef ** 2, 2.0 * mu_seq.exponent - 0.5)])
    if m.is_pos_inf:
        kind = RegimeKind.CONSISTENT
    elif m == 0:
        kind = RegimeKind.DEGENERATE_ZERO
    else:
        kind = RegimeKind.CONSERVATIVE
    return TuningRegime(
        m_limit=m,
        kind=kind,
        oracle_condition=mu_seq.exponent - 0.25 > EXPONENT_TOL,
        rho_limit=rho,
    )


def _checked_regime(regime: Optional[TuningRegime], mu_seq: PowerLawSequence) -> TuningRegime:
    actual = classify_tuning(mu_seq)
    if regime is not None and (regime.kind is not actual.kind or regime.m_limit != actual.m_limit):
        raise DomainError(
            f"Regime {regime.kind.value} does not match mu_n = {mu_seq} ({actual.kind.value})"
        )
    return actual


def selprob_limit(
    regime: Optional[TuningRegime],
    mu_seq: PowerLawSequence,
    theta_seq: ThetaSequence,
) -> SelectionLimit:
    """Limit of P(theta_hat = 0) along (mu_n, theta_n)."""
    regime = _checked_regime(regime, mu_seq)
    if regime.kind is not RegimeKind.CONSISTENT:
        m = regime.m_limit.value
        nu = sqrt_n_limit(theta_seq)
        if not nu.is_finite:
            return SelectionLimit(probability=0.0, case="conservative, |nu| = inf")
        return SelectionLimit(
            probability=normal_interval_prob(-nu.value - m, -nu.value + m),
            case=f"conservative, nu = {nu.value!r}, m = {m!r}",
        )

    zeta = zeta_limit(mu_seq, theta_seq)
    if _is_unit(zeta):
        r = knife_edge_shift(mu_seq, theta_seq, zeta.value)
        if r.is_finite:
            prob = phi_cdf(r.value)
        else:
            prob = 1.0 if r.is_pos_inf else 0.0
        return SelectionLimit(probability=prob, case=f"consistent, |zeta| = 1, r = {r.to_json()!r}")
    if abs(zeta) < 1:
        return SelectionLimit(probability=1.0, case=f"consistent, |zeta| < 1 (zeta = {zeta.to_json()!r})")
    return SelectionLimit(probability=0.0, case=f"consistent, |zeta| > 1 (zeta = {zeta.to_json()!r})")


def limit_F(
    regime: Optional[TuningRegime],
    mu_seq: PowerLawSequence,
    theta_seq: ThetaSequence,
) -> LimitDistribution:
    """Weak limit of n^{1/2}(theta_hat - theta_n)."""
    regime = _checked_regime(regime, mu_seq)

    if regime.kind is RegimeKind.DEGENERATE_ZERO:
        return LimitDistribution.standard_normal(subcase="m = 0: no shrinkage in the limit")

    if regime.kind is RegimeKind.CONSERVATIVE:
        nu = sqrt_n_limit(theta_seq)
        if nu.is_finite:
            return LimitDistribution.mixture(
                nu.value, regime.m_limit.value, subcase=f"conservative, nu = {nu.value!r}"
            )
        return LimitDistribution.standard_normal(subcase="conservative, |nu| = inf")

    zeta = zeta_limit(mu_seq, theta_seq)
    if zeta == 0:
        nu = sqrt_n_limit(theta_seq)
        if nu.is_finite:
            return LimitDistribution.point_mass(0.0 - nu.value, subcase=f"zeta = 0, nu = {nu.value!r}")
        return LimitDistribution.escape(nu.is_pos_inf, subcase=f"zeta = 0, nu = {nu.to_json()}")

    if zeta.is_finite:
        _is_unit(zeta)
        if abs(zeta) < 1:
            band = "0 < |zeta| < 1"
        elif abs(zeta) == 1:
            band = "|zeta| = 1"
        else:
            band = "1 < |zeta| < inf"
        return LimitDistribution.escape(zeta.sign() > 0, subcase=f"{band}, zeta = {zeta.value!r}")

    q = oracle_shift(mu_seq, theta_seq)
    if q.is_finite:
        return LimitDistribution.shifted_normal(q.value, subcase=f"|zeta| = inf, r = {q.value!r}")
    return LimitDistribution.escape(q.is_pos_inf, subcase=f"|zeta| = inf, r = {q.to_json()}")


def limit_G(mu_seq: PowerLawSequence, theta_seq: ThetaSequence) -> LimitDistribution:
    """Weak limit of mu_n^{-1}(theta_hat - theta_n) under consistent tuning."""
    regime = classify_tuning(mu_seq)
    if regime.kind is not RegimeKind.CONSISTENT:
        raise DomainError(f"limit_G needs consistent tuning; mu_n = {mu_seq} is {regime.kind.value}")
    zeta = zeta_limit(mu_seq, theta_seq)
    if not zeta.is_finite:
        return LimitDistribution.point_mass(0.0, subcase="|zeta| = inf")
    if abs(zeta.value) < 1:
        return LimitDistribution.point_mass(0.0 - zeta.value, subcase=f"|zeta| < 1, zeta = {zeta.value!r}")
    return LimitDistribution.point_mass(-1.0 / zeta.value, subcase=f"1 <= |zeta| < inf, zeta = {zeta.value!r}")


def uniform_rate(mu_seq: PowerLawSequence, n: int) -> float:
    """a_n = min(n^{1/2}, 1 / mu_n)."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return min(math.sqrt(n), 1.0 / float(mu_seq.eval(n)))


def root_asymptotics_check(
    mu_seq: PowerLawSequence,
    theta_seq: ThetaSequence,
    x: float,
    n_grid: Sequence[int],
) -> list[float]:
    """
    (z(x) - x) / (n^{1/2} mu_n^2 / theta_n) along n_grid.

    z is the upper root for theta_n > 0 and the lower root for theta_n < 0.
    """
    zeta = zeta_limit(mu_seq, theta_seq)
    nu = sqrt_n_limit(theta_seq)
    if zeta.is_finite or nu.is_finite or zeta.sign() != nu.sign():
        raise DomainError(
            "root asymptotics need theta_n / mu_n -> +/-inf and n^{1/2} theta_n -> +/-inf with equal signs"
        )
    ratios = []
    for n in n_grid:
        theta = float(theta_seq.eval(n))
        mu = float(mu_seq.eval(n))
        model = LocationModel(n=int(n), theta=theta, mu=mu)
        pair = roots(model, x)
        z = pair.z2 if theta > 0 else pair.z1
        ratios.append((z - x) / (math.sqrt(n) * mu * mu / theta))
    return ratios


# Finite-n consequences and witnesses

def exact_deviation_prob(model: LocationModel, eps: float) -> float:
    """P(|theta_hat - theta| > eps) from the exact cdf."""
    if not eps > 0:
        raise DomainError(f"eps must be positive, got {eps}")
    s = model.sqrt_n * eps
    return float(1.0 - cdf_F(model, s) + cdf_F_left(model, -s))


def uniform_consistency_sup(n: int, mu: float, eps: float, theta_grid: Sequence[float]) -> float:
    return max(exact_deviation_prob(LocationModel(n=n, theta=float(t), mu=mu), eps) for t in theta_grid)


def ml_deviation_prob(model: LocationModel, eps: float) -> float:
    """
    P(n^{1/2} |theta_hat - y_bar| > eps).

    theta_hat - y_bar is -y_bar on |y_bar| <= mu and -mu^2 / y_bar beyond, so
    the event is e < |y_bar| < mu^2 / e with e = eps / n^{1/2}, empty if e >= mu.
    """
    if not eps > 0:
        raise DomainError(f"eps must be positive, got {eps}")
    e = eps / model.sqrt_n
    if e >= model.mu:
        return 0.0
    upper = model.mu * model.mu / e
    rn, th = model.sqrt_n, model.theta
    right = normal_interval_prob(rn * (e - th), rn * (upper - th))
    left = normal_interval_prob(rn * (-upper - th), rn * (-e - th))
    return float(right + left)


def ml_equivalence_bound(n: int, mu: float, eps: float) -> float:
    """The bound 2 * 1(n^{1/2} mu > eps) on sup_theta P(n^{1/2} |theta_hat - y_bar| > eps)."""
    return 2.0 if math.sqrt(n) * mu > eps else 0.0


def default_theta_grid(mu: float, n: int) -> np.ndarray:
    """Grid covering the region where the estimator is least regular, plus fixed values."""
    local = mu * np.linspace(-4.0, 4.0, 33)
    near_zero = np.linspace(-4.0, 4.0, 17) / math.sqrt(n)
    return np.unique(np.concatenate([local, near_zero, [-1.0, 1.0]]))


def uniform_rate_check(
    mu_seq: PowerLawSequence,
    n_grid: Sequence[int],
    theta_grid: Optional[Sequence[float]] = None,
    reps: int = 10000,
    seed: int = 0,
    quantile: float = 0.99,
) -> list[dict]:
    """Sup over theta of the empirical quantile of a_n |theta_hat - theta|, per n."""
    rows = []
    for i, n in enumerate(n_grid):
        mu = float(mu_seq.eval(n))
        a_n = uniform_rate(mu_seq, n)
        grid = default_theta_grid(mu, n) if theta_grid is None else np.asarray(theta_grid, dtype=float)
        rng = replication_rng(seed, i)
        noise = rng.standard_normal(int(reps)) / math.sqrt(n)
        worst = 0.0
        for theta in grid:
            est = alasso_location_array(theta + noise, mu)
            worst = max(worst, float(np.quantile(a_n * np.abs(est - theta), quantile)))
        rows.append({"n": int(n), "mu": mu, "a_n": a_n, "sup_quantile": worst})
        logger.debug("uniform_rate_check: n=%d a_n=%g sup q%.2f=%g", n, a_n, quantile, worst)
    return rows


def convergence_table(
    mu_seq: PowerLawSequence,
    theta_seq: ThetaSequence,
    n_grid: Sequence[int],
    x_grid: Sequence[float],
    scale: ScaleKind = ScaleKind.SQRT_N,
) -> list[dict]:
    """Sup over x_grid of |finite-n cdf - limit cdf| for each n."""
    x = np.asarray(x_grid, dtype=float)
    if scale is ScaleKind.SQRT_N:
        limit = limit_F(None, mu_seq, theta_seq)
        cdf = cdf_F
    else:
        limit = limit_G(mu_seq, theta_seq)
        cdf = cdf_G
    target = np.asarray(limit.cdf(x))
    rows = []
    for n in n_grid:
        model = LocationModel(n=int(n), theta=float(theta_seq.eval(n)), mu=float(mu_seq.eval(n)))
        rows.append({"n": int(n), "sup_distance": float(np.max(np.abs(cdf(model, x) - target)))})
    return rows


def oracle_reconciliation(
    mu_seq: PowerLawSequence,
    theta_fixed: float,
    zeta: float,
    n_grid: Sequence[int],
    x_grid: Sequence[float],
) -> dict:
    """
    Distance between F and Phi for fixed theta versus theta_n = zeta mu_n.

    The first column shrinks along n when the oracle condition holds; the
    second does not.
    """
    x = np.asarray(x_grid, dtype=float)
    phi = phi_cdf_array(x)
    fixed, moving = [], []
    for n in n_grid:
        mu = float(mu_seq.eval(n))
        fixed.append(float(np.max(np.abs(cdf_F(LocationModel(n=int(n), theta=theta_fixed, mu=mu), x) - phi))))
        moving.append(float(np.max(np.abs(cdf_F(LocationModel(n=int(n), theta=zeta * mu, mu=mu), x) - phi))))
    return {"n_grid": [int(n) for n in n_grid], "fixed_theta": fixed, "moving_theta": moving}
