"""
Standard normal special functions.

Thin wrappers over scipy.special: ``ndtr`` is accurate to a few ulps over the
whole real line and ``ndtri`` is its inverse. Scalar entry points reject
non-finite input; the ``*_array`` variants are vectorized and trust the caller.
"""
import math

import numpy as np
from scipy import special

from .errors import DomainError

SQRT_2PI = math.sqrt(2.0 * math.pi)


def _check_finite(x: float, name: str = "x") -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x}")
    return x


def phi_cdf(x: float) -> float:
    """Standard normal cdf."""
    return float(special.ndtr(_check_finite(x)))


def phi_pdf(x: float) -> float:
    x = _check_finite(x)
    return math.exp(-0.5 * x * x) / SQRT_2PI


def phi_quantile(p: float) -> float:
    p = float(p)
    if not (0.0 < p < 1.0):
        raise DomainError(f"Quantile level must lie in (0, 1), got {p}")
    return float(special.ndtri(p))


def phi_cdf_array(x) -> np.ndarray:
    return special.ndtr(np.asarray(x, dtype=float))


def phi_pdf_array(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * x * x) / SQRT_2PI


def normal_interval_prob(a, b):
    """
    Phi(b) - Phi(a), evaluated on the tail that avoids cancellation.

    When both endpoints are positive the difference is formed from upper tails
    Phi(-a) - Phi(-b), which keeps full relative precision for tiny intervals
    far out on the right.
    """
    a_arr = np.asarray(a, dtype=float)
    b_arr = np.asarray(b, dtype=float)
    right = a_arr > 0
    out = np.where(
        right,
        special.ndtr(-a_arr) - special.ndtr(-b_arr),
        special.ndtr(b_arr) - special.ndtr(a_arr),
    )
    if out.ndim == 0:
        return float(out)
    return out


class NormalFns:
    """Stateless table of the standard normal cdf, density and quantile."""

    cdf = staticmethod(phi_cdf)
    pdf = staticmethod(phi_pdf)
    quantile = staticmethod(phi_quantile)
    interval = staticmethod(normal_interval_prob)
