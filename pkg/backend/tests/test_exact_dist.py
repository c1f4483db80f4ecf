import math

import numpy as np
import pytest
from pydantic import ValidationError

from aldist.core.errors import DomainError
from aldist.core.normal import phi_cdf
from aldist.models.location import LocationModel, ScaleKind
from aldist.services.exact_dist import (
    atom_location,
    cdf_F,
    cdf_F_left,
    cdf_G,
    cdf_G_w,
    continuous_mass,
    density_f,
    density_f_array,
    density_g,
    distribution_table,
    dkw_halfwidth,
    empirical_cdf_gap,
    empirical_selection_frequency,
    finite_sample_dist,
    restricted_cdf,
    roots,
    selection_prob,
    unrestricted_cdf,
)


def random_models(seed: int, count: int):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        yield LocationModel(
            n=int(rng.integers(1, 2000)),
            theta=float(rng.normal(0, 0.5)),
            mu=float(rng.uniform(0.005, 0.8)),
        )


def test_worked_example_atom(worked_example_model):
    dist = finite_sample_dist(worked_example_model)
    assert dist.atom_location == pytest.approx(-0.3162277660, abs=1e-9)
    expected = phi_cdf(math.sqrt(10) * (-0.1 + 0.05)) - phi_cdf(math.sqrt(10) * (-0.1 - 0.05))
    assert dist.atom_mass == pytest.approx(expected, abs=1e-14)
    assert dist.atom_mass + dist.continuous_mass == pytest.approx(1.0)


def test_selection_prob_example(erf_interval):
    model = LocationModel(n=100, theta=0.0, mu=0.1)
    assert selection_prob(model) == pytest.approx(0.682689, abs=1e-6)
    assert selection_prob(model) == pytest.approx(erf_interval(-1.0, 1.0), abs=1e-14)


def test_g_scale_atom():
    model = LocationModel(n=100, theta=0.02, mu=0.1)
    assert atom_location(model, ScaleKind.INV_MU) == pytest.approx(-0.2)
    assert finite_sample_dist(model, ScaleKind.INV_MU).atom_location == pytest.approx(-0.2)


def test_model_validation():
    with pytest.raises(ValidationError):
        LocationModel(n=0, theta=0.1, mu=0.1)
    with pytest.raises(ValidationError):
        LocationModel(n=10, theta=0.1, mu=0.0)
    with pytest.raises(ValidationError):
        LocationModel(n=10, theta=math.inf, mu=0.1)


def test_roots_solve_the_quadratic_and_sandwich_the_pivot():
    rng = np.random.default_rng(4)
    for model in random_models(1, 500):
        x = float(rng.normal(0, 3))
        pair = roots(model, x)
        a, m2 = model.sqrt_n_theta, model.n_mu_sq
        for z in (pair.z1, pair.z2):
            resid = z * z + (a - x) * z - (m2 + a * x)
            assert abs(resid) <= 1e-9 * max(1.0, z * z, abs(a * x), m2)
        pivot = -a + model.sqrt_n_mu
        slack = 1e-9 * max(1.0, abs(pivot))
        assert pair.z1 <= pivot + slack
        if a + x >= 0:
            assert pair.z2 >= pivot - slack
        else:
            assert pair.z2 <= pivot + slack


def test_roots_do_not_cancel_for_large_theta():
    # z2 - x is about n mu^2 / (n^{1/2} theta) = 1e-6 here; naive formula loses it
    model = LocationModel(n=10 ** 8, theta=1.0, mu=1e-5)
    pair = roots(model, 0.5)
    assert pair.z2 - 0.5 == pytest.approx(1e-2 / (1e4 + 0.5), rel=1e-6)


def test_cdf_is_a_distribution_function():
    for model in random_models(2, 30):
        grid = np.linspace(-60, 60, 3001)
        f = cdf_F(model, grid)
        assert np.all(np.diff(f) >= 0)
        assert f[0] <= 1e-12 and f[-1] >= 1 - 1e-12


def test_jump_at_atom_equals_selection_prob():
    for model in random_models(3, 30):
        atom = -model.sqrt_n_theta
        jump = cdf_F(model, atom) - cdf_F_left(model, atom)
        assert jump == pytest.approx(selection_prob(model), abs=1e-10)


def test_left_limit_only_differs_at_atom(worked_example_model):
    x = np.array([-1.0, 0.0, 2.0])
    assert np.array_equal(cdf_F(worked_example_model, x), cdf_F_left(worked_example_model, x))


def test_mirror_symmetry():
    rng = np.random.default_rng(5)
    for model in random_models(4, 30):
        mirror = LocationModel(n=model.n, theta=-model.theta, mu=model.mu)
        x = rng.normal(0, 2, 25)
        x = x[np.abs(x + model.sqrt_n_theta) > 1e-6]
        assert np.allclose(cdf_F(mirror, -x) + cdf_F_left(model, x), 1.0, atol=1e-12)


def test_total_mass_is_one():
    for model in random_models(6, 15):
        assert selection_prob(model) + continuous_mass(model) == pytest.approx(1.0, abs=1e-6)


def test_density_is_derivative_of_cdf(worked_example_model):
    h = 1e-6
    for x in (-1.0, 0.2, 1.5):
        fd = (cdf_F(worked_example_model, x + h) - cdf_F(worked_example_model, x - h)) / (2 * h)
        assert density_f(worked_example_model, x) == pytest.approx(fd, abs=1e-6)


def test_density_is_even_when_theta_is_zero():
    model = LocationModel(n=25, theta=0.0, mu=0.2)
    x = np.array([0.1, 0.5, 1.0, 2.0, 4.0])
    assert np.array_equal(density_f(model, x), density_f(model, -x))


def test_density_undefined_at_atom(worked_example_model):
    atom = -worked_example_model.sqrt_n_theta
    with pytest.raises(DomainError):
        density_f(worked_example_model, atom)
    assert math.isnan(float(density_f_array(worked_example_model, atom)))


def test_cdf_rejects_non_finite(worked_example_model):
    with pytest.raises(DomainError):
        cdf_F(worked_example_model, math.nan)


def test_g_matches_f_and_rescaled_roots():
    rng = np.random.default_rng(7)
    for model in random_models(8, 100):
        x = rng.normal(0, 2, 5)
        assert np.allclose(cdf_G(model, x), cdf_F(model, model.sqrt_n_mu * x), rtol=0, atol=1e-14)
        assert np.allclose(cdf_G_w(model, x), cdf_G(model, x), rtol=0, atol=1e-12)


def test_density_g_chain_rule(worked_example_model):
    x = 0.7
    expected = worked_example_model.sqrt_n_mu * density_f(worked_example_model, worked_example_model.sqrt_n_mu * x)
    assert density_g(worked_example_model, x) == pytest.approx(expected, rel=1e-15)


def test_reference_laws(worked_example_model):
    assert unrestricted_cdf(0.0) == 0.5
    atom = -worked_example_model.sqrt_n_theta
    assert restricted_cdf(worked_example_model, atom) == 1.0
    assert restricted_cdf(worked_example_model, atom - 1e-9) == 0.0


def test_distribution_table(worked_example_model):
    table = distribution_table(worked_example_model, np.linspace(-4, 4, 401))
    assert list(table.columns) == ["x", "cdf", "cdf_left", "density"]
    assert len(table) == 401
    assert table["cdf"].is_monotonic_increasing
    g_table = distribution_table(worked_example_model, [0.5], ScaleKind.INV_MU)
    assert g_table["cdf"].iloc[0] == pytest.approx(cdf_G(worked_example_model, 0.5))


def test_dkw_halfwidth():
    assert dkw_halfwidth(10 ** 6, 0.01) == pytest.approx(math.sqrt(math.log(200) / 2e6))
    with pytest.raises(DomainError):
        dkw_halfwidth(0)


def test_empirical_cdf_within_dkw_band(worked_example_model):
    res = empirical_cdf_gap(worked_example_model, 200_000, seed=1)
    assert res["within_band"], res


def test_empirical_selection_frequency(worked_example_model):
    freq = empirical_selection_frequency(worked_example_model, 200_000, seed=2)
    p = selection_prob(worked_example_model)
    assert abs(freq - p) <= 5 * math.sqrt(p * (1 - p) / 200_000)


def test_simulation_is_reproducible(worked_example_model):
    a = empirical_cdf_gap(worked_example_model, 5000, seed=9)
    b = empirical_cdf_gap(worked_example_model, 5000, seed=9)
    assert a == b
