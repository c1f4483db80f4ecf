"""
Exact finite-sample distribution of the adaptive LASSO in the location model.

F is the cdf of n^{1/2}(theta_hat - theta), G the cdf of mu^{-1}(theta_hat - theta).
Both have an atom (the event theta_hat = 0) plus an absolutely continuous part
expressed through the roots of a quadratic.
"""
import math
from typing import Optional, Sequence

import numpy as np
import pandas as pd
from scipy import integrate

from ..core.errors import DomainError
from ..core.log import get_logger
from ..core.normal import normal_interval_prob, phi_cdf_array, phi_pdf_array
from ..core.rng import replication_rng
from ..core.roots import root_pair, select_root
from ..models.location import FiniteSampleDist, LocationModel, RootPair, ScaleKind
from .estimators import alasso_location_array

logger = get_logger(__name__)

QUAD_TAIL = 40.0


def _as_points(x):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("Evaluation points must be finite")
    return arr


def _out(arr):
    arr = np.asarray(arr)
    return float(arr) if arr.ndim == 0 else arr


def selection_prob(model: LocationModel) -> float:
    """P(theta_hat = 0) = Phi(-n^{1/2} theta + n^{1/2} mu) - Phi(-n^{1/2} theta - n^{1/2} mu)."""
    a, m = model.sqrt_n_theta, model.sqrt_n_mu
    return normal_interval_prob(-a - m, -a + m)


def atom_location(model: LocationModel, scale: ScaleKind = ScaleKind.SQRT_N) -> float:
    if scale is ScaleKind.SQRT_N:
        return -model.sqrt_n_theta
    return -model.theta / model.mu


def roots(model: LocationModel, x: float) -> RootPair:
    """Roots of z^2 + (n^{1/2} theta - x) z - (n mu^2 + n^{1/2} theta x) = 0."""
    x = float(_as_points(x))
    z1, z2, _, _ = root_pair(model.sqrt_n_theta, x, model.n_mu_sq)
    return RootPair(z1=float(z1), z2=float(z2))


def cdf_F(model: LocationModel, x):
    """Right-continuous cdf of n^{1/2}(theta_hat - theta)."""
    x = _as_points(x)
    return _out(phi_cdf_array(select_root(model.sqrt_n_theta, x, model.n_mu_sq)))


def cdf_F_left(model: LocationModel, x):
    """Left limit F(x-); differs from F only at the atom."""
    x = _as_points(x)
    return _out(phi_cdf_array(select_root(model.sqrt_n_theta, x, model.n_mu_sq, strict=True)))


def density_f_array(model: LocationModel, x) -> np.ndarray:
    """Density of the continuous part; NaN at the atom where it is undefined."""
    x = _as_points(x)
    z1, z2, h, s = root_pair(model.sqrt_n_theta, x, model.n_mu_sq)
    with np.errstate(invalid="ignore", divide="ignore"):
        t = h / s
    upper = 0.5 * phi_pdf_array(z2) * (1.0 + t)
    lower = 0.5 * phi_pdf_array(z1) * (1.0 - t)
    return np.where(h > 0, upper, np.where(h < 0, lower, np.nan))


def density_f(model: LocationModel, x):
    x = _as_points(x)
    if np.any(model.sqrt_n_theta + x == 0):
        raise DomainError(f"Density is undefined at the atom x = {-model.sqrt_n_theta!r}")
    return _out(density_f_array(model, x))


def cdf_G(model: LocationModel, x):
    """cdf of mu^{-1}(theta_hat - theta): G(x) = F(n^{1/2} mu x)."""
    x = _as_points(x)
    return cdf_F(model, model.sqrt_n_mu * x)


def cdf_G_w(model: LocationModel, x):
    """G through the rescaled roots w = n^{1/2} mu [(x - theta/mu) +/- sqrt((theta/mu + x)^2 + 4)] / 2."""
    x = _as_points(x)
    w = model.sqrt_n_mu * select_root(model.theta / model.mu, x, 1.0)
    return _out(phi_cdf_array(w))


def density_g(model: LocationModel, x):
    x = _as_points(x)
    return _out(model.sqrt_n_mu * np.asarray(density_f(model, model.sqrt_n_mu * x)))


def unrestricted_cdf(x):
    """Law of n^{1/2}(y_bar - theta): standard normal."""
    return _out(phi_cdf_array(_as_points(x)))


def restricted_cdf(model: LocationModel, x):
    """Law of n^{1/2}(0 - theta): point mass at -n^{1/2} theta."""
    x = _as_points(x)
    return _out((x >= -model.sqrt_n_theta).astype(float))


def continuous_mass(model: LocationModel, epsabs: float = 1e-10) -> float:
    """Integral of density_f, split at the atom."""
    atom = -model.sqrt_n_theta
    lo = min(atom, 0.0) - QUAD_TAIL
    hi = max(atom, 0.0) + QUAD_TAIL
    hints = [0.0]
    if model.sqrt_n_theta != 0:
        # x where the active root crosses zero
        hints.append(-model.n_mu_sq / model.sqrt_n_theta)

    def f(v: float) -> float:
        return float(density_f_array(model, v))

    total = 0.0
    for a, b in ((lo, atom), (atom, hi)):
        if b <= a:
            continue
        pts = [p for p in hints if a < p < b] or None
        val, err = integrate.quad(f, a, b, points=pts, epsabs=epsabs, epsrel=1e-12, limit=400)
        total += val
    return total


def finite_sample_dist(model: LocationModel, scale: ScaleKind = ScaleKind.SQRT_N) -> FiniteSampleDist:
    mass = selection_prob(model)
    return FiniteSampleDist(
        model=model,
        scale=scale,
        atom_location=atom_location(model, scale),
        atom_mass=mass,
        continuous_mass=min(1.0, max(0.0, 1.0 - mass)),
    )


def distribution_table(model: LocationModel, grid, scale: ScaleKind = ScaleKind.SQRT_N) -> pd.DataFrame:
    """cdf, left limit and continuous density on a grid; the density is NaN at the atom."""
    x = _as_points(grid).reshape(-1)
    factor = 1.0 if scale is ScaleKind.SQRT_N else model.sqrt_n_mu
    return pd.DataFrame({
        "x": x,
        "cdf": np.atleast_1d(cdf_F(model, factor * x)),
        "cdf_left": np.atleast_1d(cdf_F_left(model, factor * x)),
        "density": factor * density_f_array(model, factor * x),
    })


# Simulation checks

def dkw_halfwidth(reps: int, alpha: float = 0.01) -> float:
    """Half-width of the Dvoretzky-Kiefer-Wolfowitz band at level 1 - alpha."""
    if reps < 1 or not (0 < alpha < 1):
        raise DomainError("DKW band needs reps >= 1 and alpha in (0, 1)")
    return math.sqrt(math.log(2.0 / alpha) / (2.0 * reps))


def simulate_estimates(model: LocationModel, reps: int, seed: int) -> np.ndarray:
    """theta_hat over reps simulated sample means y_bar ~ N(theta, 1/n)."""
    rng = replication_rng(seed, 0)
    y_bar = model.theta + rng.standard_normal(int(reps)) / model.sqrt_n
    return alasso_location_array(y_bar, model.mu)


def simulate_scaled(model: LocationModel, reps: int, seed: int) -> np.ndarray:
    return model.sqrt_n * (simulate_estimates(model, reps, seed) - model.theta)


def empirical_selection_frequency(model: LocationModel, reps: int, seed: int) -> float:
    return float(np.mean(simulate_estimates(model, reps, seed) == 0.0))


def empirical_cdf_gap(
    model: LocationModel,
    reps: int,
    seed: int,
    grid: Optional[Sequence[float]] = None,
    alpha: float = 0.01,
) -> dict:
    """Sup over the grid of |empirical cdf - F| next to the DKW half-width."""
    grid = np.linspace(-4.0, 4.0, 401) if grid is None else _as_points(grid)
    draws = np.sort(simulate_scaled(model, reps, seed))
    ecdf = np.searchsorted(draws, grid, side="right") / draws.size
    gap = float(np.max(np.abs(ecdf - cdf_F(model, grid))))
    band = dkw_halfwidth(draws.size, alpha)
    logger.debug("empirical_cdf_gap: n=%d theta=%g mu=%g gap=%.5f band=%.5f",
                 model.n, model.theta, model.mu, gap, band)
    return {"sup_gap": gap, "dkw_halfwidth": band, "within_band": gap <= band, "reps": int(draws.size)}
