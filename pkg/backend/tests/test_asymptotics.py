import math

import numpy as np
import pytest

from aldist.core.errors import DomainError, InconsistentTuningError, UnresolvedCaseError
from aldist.core.sequences import PowerLawSequence, ThetaSequence
from aldist.models.asymptotics import LimitTag, RegimeKind
from aldist.models.location import LocationModel, ScaleKind
from aldist.services import asymptotics
from aldist.services.estimators import alasso_location_array
from aldist.services.exact_dist import cdf_F, selection_prob


def seq(mu_text: str, theta_text: str):
    return PowerLawSequence.parse(mu_text), ThetaSequence.parse(theta_text)


@pytest.mark.parametrize("mu_text, kind, oracle", [
    ("n^-1/2", RegimeKind.CONSERVATIVE, True),
    ("3*n^-1/2", RegimeKind.CONSERVATIVE, True),
    ("n^-1/3", RegimeKind.CONSISTENT, True),
    ("n^-1/4", RegimeKind.CONSISTENT, False),
    ("n^-1/5", RegimeKind.CONSISTENT, False),
    ("n^-0.7", RegimeKind.DEGENERATE_ZERO, True),
])
def test_classify_tuning(mu_text, kind, oracle):
    regime = asymptotics.classify_tuning(PowerLawSequence.parse(mu_text))
    assert regime.kind is kind
    assert regime.oracle_condition is oracle


def test_classify_rejects_non_vanishing_tuning():
    with pytest.raises(InconsistentTuningError):
        asymptotics.classify_tuning(PowerLawSequence(coef=1.0, exponent=0.0))
    with pytest.raises(InconsistentTuningError):
        asymptotics.classify_tuning(PowerLawSequence(coef=1.0, exponent=-0.1))


def test_rho_limit_at_quarter_rate():
    regime = asymptotics.classify_tuning(PowerLawSequence(coef=2.0, exponent=0.25))
    assert regime.rho_limit == 4.0
    assert not regime.oracle_condition


@pytest.mark.parametrize("mu_text, theta_text, tag, value", [
    ("n^-1/2", "0", LimitTag.CONSERVATIVE_MIXTURE, 0.0),
    ("n^-1/2", "n^-1/2", LimitTag.CONSERVATIVE_MIXTURE, 1.0),
    ("n^-1/2", "1", LimitTag.STANDARD_NORMAL, None),
    ("n^-1/3", "0", LimitTag.POINT_MASS, 0.0),
    ("n^-1/3", "n^-1/2", LimitTag.POINT_MASS, -1.0),
    ("n^-1/3", "0.5*n^-1/3", LimitTag.ESCAPE_POS, None),
    ("n^-1/3", "-0.5*n^-1/3", LimitTag.ESCAPE_NEG, None),
    ("n^-1/3", "5", LimitTag.SHIFTED_NORMAL, 0.0),
    ("n^-1/4", "1", LimitTag.SHIFTED_NORMAL, 1.0),
    ("n^-1/3", "n^-0.4", LimitTag.ESCAPE_POS, None),
    ("n^-1/5", "1", LimitTag.ESCAPE_POS, None),
    ("n^-1/3", "2*n^-1/3", LimitTag.ESCAPE_POS, None),
    ("n^-0.7", "1", LimitTag.STANDARD_NORMAL, None),
])
def test_limit_f_regime_table(mu_text, theta_text, tag, value):
    mu_seq, theta_seq = seq(mu_text, theta_text)
    limit = asymptotics.limit_F(None, mu_seq, theta_seq)
    assert limit.tag is tag, limit.subcase
    if tag is LimitTag.POINT_MASS:
        assert limit.location.value == value
    elif tag is LimitTag.SHIFTED_NORMAL:
        assert limit.shift == pytest.approx(value)
    elif tag is LimitTag.CONSERVATIVE_MIXTURE:
        assert limit.nu == value


@pytest.mark.parametrize("mu_text, theta_text, probes", [
    ("n^-1/2", "n^-1/2", [-1.5, -0.5, 0.5, 1.5]),
    ("n^-1/3", "0", [-1.5, -0.5, 0.5, 1.5]),
    ("n^-1/3", "n^-1/2", [-1.5, -0.5, 0.5, 1.5]),
    ("n^-1/3", "0.5*n^-1/3", [-4.0, -1.5, 0.5, 4.0]),
    ("n^-1/3", "-0.5*n^-1/3", [-4.0, -0.5, 1.5, 4.0]),
    ("n^-1/4", "1", [-1.5, -0.5, 0.5, 1.5]),
    ("n^-1/5", "1", [-1.5, -0.5, 0.5, 1.5]),
])
def test_finite_n_cdf_is_close_to_limit(mu_text, theta_text, probes):
    mu_seq, theta_seq = seq(mu_text, theta_text)
    limit = asymptotics.limit_F(None, mu_seq, theta_seq)
    n = 10 ** 6
    model = LocationModel(n=n, theta=float(theta_seq.eval(n)), mu=float(mu_seq.eval(n)))
    x = np.asarray(probes)
    assert np.max(np.abs(cdf_F(model, x) - limit.cdf(x))) <= 0.02


def test_mixture_limit_cdf_is_exact_at_finite_n():
    mu_seq, theta_seq = seq("n^-1/2", "-2*n^-1/2")
    x = np.linspace(-5, 5, 100)
    rows = asymptotics.convergence_table(mu_seq, theta_seq, [100, 10 ** 4, 10 ** 6], x)
    dist = [r["sup_distance"] for r in rows]
    assert all(b <= a + 1e-12 for a, b in zip(dist, dist[1:]))
    assert dist[-1] < 5e-3


def test_limit_g_point_masses():
    mu_seq = PowerLawSequence.parse("n^-1/3")
    assert asymptotics.limit_G(mu_seq, ThetaSequence.parse("0.5*n^-1/3")).location.value == -0.5
    assert asymptotics.limit_G(mu_seq, ThetaSequence.parse("2*n^-1/3")).location.value == -0.5
    assert asymptotics.limit_G(mu_seq, ThetaSequence.parse("-4*n^-1/3")).location.value == 0.25
    assert asymptotics.limit_G(mu_seq, ThetaSequence.constant(1.0)).location.value == 0.0


def test_limit_g_needs_consistent_tuning():
    with pytest.raises(DomainError):
        asymptotics.limit_G(PowerLawSequence.parse("n^-1/2"), ThetaSequence.constant(1.0))


def test_g_convergence_table_shrinks():
    rows = asymptotics.convergence_table(
        PowerLawSequence.parse("n^-1/3"), ThetaSequence.parse("0.5*n^-1/3"),
        [100, 10 ** 4, 10 ** 6], [-1.0, -0.25, 0.0, 0.5], ScaleKind.INV_MU,
    )
    dist = [r["sup_distance"] for r in rows]
    assert dist[-1] < dist[0]
    assert dist[-1] < 0.01


@pytest.mark.parametrize("mu_text, theta_text, expected", [
    ("n^-1/2", "0", 0.6826894921370859),
    ("2*n^-1/2", "-1*n^-1/2", None),
    ("n^-1/2", "1", 0.0),
    ("n^-1/3", "0.5*n^-1/3", 1.0),
    ("n^-1/3", "2*n^-1/3", 0.0),
    ("n^-1/3", "n^-1/3+0.5*n^-1/2", 0.3085375387259869),
    ("n^-1/3", "n^-1/3-1*n^-1/2", 0.8413447460685429),
    ("n^-1/3", "-1*n^-1/3+0.5*n^-1/2", 0.6914624612740131),
])
def test_selprob_limit(mu_text, theta_text, expected):
    mu_seq, theta_seq = seq(mu_text, theta_text)
    got = asymptotics.selprob_limit(None, mu_seq, theta_seq).probability
    if expected is None:
        # nu = -1, m = 2: Phi(1 + 2) - Phi(1 - 2)
        expected = 0.9986501019683699 - 0.15865525393145707
    assert got == pytest.approx(expected, abs=1e-12)


def test_selprob_limit_agrees_with_large_n():
    n = 10 ** 8
    for mu_text, theta_text in [("n^-1/3", "n^-1/3+0.5*n^-1/2"), ("2*n^-1/2", "-1*n^-1/2")]:
        mu_seq, theta_seq = seq(mu_text, theta_text)
        lim = asymptotics.selprob_limit(None, mu_seq, theta_seq).probability
        model = LocationModel(n=n, theta=float(theta_seq.eval(n)), mu=float(mu_seq.eval(n)))
        assert selection_prob(model) == pytest.approx(lim, abs=2e-3)


def test_knife_edge_near_cancellation_is_unresolved():
    mu_seq = PowerLawSequence.parse("n^-1/3")
    theta_seq = ThetaSequence(components=[(1.0 + 1e-14, 1.0 / 3.0)])
    with pytest.raises(UnresolvedCaseError):
        asymptotics.selprob_limit(None, mu_seq, theta_seq)


def test_regime_mismatch_is_rejected():
    regime = asymptotics.classify_tuning(PowerLawSequence.parse("n^-1/2"))
    with pytest.raises(DomainError):
        asymptotics.limit_F(regime, PowerLawSequence.parse("n^-1/3"), ThetaSequence.constant(1.0))


def test_uniform_rate():
    mu_seq = PowerLawSequence.parse("n^-1/3")
    assert asymptotics.uniform_rate(mu_seq, 10 ** 6) == pytest.approx(100.0)
    assert asymptotics.uniform_rate(PowerLawSequence.parse("n^-1/2"), 100) == pytest.approx(10.0)


def test_uniform_rate_check_stays_bounded():
    rows = asymptotics.uniform_rate_check(PowerLawSequence.parse("n^-1/3"), [100, 10 ** 4], reps=2000, seed=1)
    assert [r["n"] for r in rows] == [100, 10 ** 4]
    assert all(r["sup_quantile"] < 5.0 for r in rows)


@pytest.mark.parametrize("theta, x", [(1.0, 0.0), (1.0, 1.0), (-1.0, 0.0), (-1.0, -0.5)])
def test_root_asymptotics(theta, x):
    ratios = asymptotics.root_asymptotics_check(
        PowerLawSequence.parse("n^-1/3"), ThetaSequence.constant(theta), x, [10 ** 4, 10 ** 8]
    )
    assert abs(ratios[-1] - 1.0) <= 1e-3
    assert abs(ratios[-1] - 1.0) < abs(ratios[0] - 1.0)


def test_root_asymptotics_preconditions():
    with pytest.raises(DomainError):
        asymptotics.root_asymptotics_check(
            PowerLawSequence.parse("n^-1/3"), ThetaSequence.parse("0.5*n^-1/3"), 0.0, [100]
        )


def test_oracle_reconciliation():
    x = np.linspace(-4, 4, 81)
    table = asymptotics.oracle_reconciliation(PowerLawSequence.parse("n^-1/3"), 1.0, 0.5, [100, 10 ** 4, 10 ** 6], x)
    fixed, moving = table["fixed_theta"], table["moving_theta"]
    assert fixed[0] > fixed[1] > fixed[2]
    assert moving[-1] > 0.9


def test_exact_deviation_prob_and_uniform_consistency():
    n, eps = 10 ** 4, 0.1
    mu = n ** (-1 / 3)
    grid = np.linspace(-0.5, 0.5, 41)
    sup = asymptotics.uniform_consistency_sup(n, mu, eps, grid)
    assert -1e-12 <= sup < 1e-6
    wide = asymptotics.exact_deviation_prob(LocationModel(n=10, theta=0.1, mu=0.05), 0.05)
    assert 0.5 < wide <= 1.0
    with pytest.raises(DomainError):
        asymptotics.exact_deviation_prob(LocationModel(n=10, theta=0.1, mu=0.05), 0.0)


def test_ml_deviation_prob_respects_bound():
    n, eps = 100, 0.5
    for mu in (0.01, 0.1, 0.3):
        bound = asymptotics.ml_equivalence_bound(n, mu, eps)
        for theta in np.linspace(-1, 1, 21):
            p = asymptotics.ml_deviation_prob(LocationModel(n=n, theta=float(theta), mu=mu), eps)
            assert 0.0 <= p <= min(1.0, bound) + 1e-15
    # n^{1/2} mu <= eps: the estimator is within eps of y_bar surely
    assert asymptotics.ml_deviation_prob(LocationModel(n=n, theta=0.0, mu=0.04), eps) == 0.0


def test_ml_deviation_prob_matches_simulation():
    model = LocationModel(n=100, theta=0.15, mu=0.2)
    rng = np.random.default_rng(0)
    y_bar = model.theta + rng.standard_normal(200_000) / 10.0
    freq = np.mean(10.0 * np.abs(alasso_location_array(y_bar, model.mu) - y_bar) > 0.5)
    p = asymptotics.ml_deviation_prob(model, 0.5)
    assert abs(freq - p) <= 5 * math.sqrt(p * (1 - p) / 200_000) + 1e-9
