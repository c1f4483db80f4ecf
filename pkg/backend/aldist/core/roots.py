"""
Cancellation-safe roots of z^2 + (a - x) z - (m2 + a x) = 0.

With h = (a + x) / 2 and S = sqrt(h^2 + m2) the roots are x - h -/+ S. The
root whose two parts nearly cancel is taken from the product of roots instead.
Here a is n^{1/2} theta (or its limit nu) and m2 is n mu^2 (or m^2).
"""
import numpy as np


def root_pair(a, x, m2):
    """Return (z1, z2, h, S) elementwise; z1 <= z2."""
    a = np.asarray(a, dtype=float)
    x = np.asarray(x, dtype=float)
    m2 = np.asarray(m2, dtype=float)
    h = 0.5 * (a + x)
    s = np.hypot(h, np.sqrt(m2))
    nonneg = h >= 0
    with np.errstate(divide="ignore", invalid="ignore"):
        z1 = np.where(nonneg, x - (h + s), x - m2 / (s - h))
        z2 = np.where(nonneg, x + m2 / (s + h), x + (s - h))
    # m2 == 0 makes the ratio forms 0/0 at h == 0
    degenerate = (s == 0)
    if np.any(degenerate):
        z1 = np.where(degenerate, x, z1)
        z2 = np.where(degenerate, x, z2)
    return z1, z2, h, s


def select_root(a, x, m2, strict: bool = False):
    """z2 where a + x >= 0 (strict: > 0), z1 elsewhere."""
    z1, z2, _, _ = root_pair(a, x, m2)
    upper = (np.asarray(a, dtype=float) + np.asarray(x, dtype=float))
    mask = upper > 0 if strict else upper >= 0
    return np.where(mask, z2, z1)
