"""
Large-sample regime and limit-law models.
"""
from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator

from ..core.extended import ExtendedReal
from ..core.normal import phi_cdf_array
from ..core.roots import select_root


class RegimeKind(str, Enum):
    CONSERVATIVE = "conservative"
    CONSISTENT = "consistent"
    DEGENERATE_ZERO = "degenerate_zero"


class TuningRegime(BaseModel):
    """Classification of a tuning sequence mu_n."""
    m_limit: ExtendedReal = Field(..., description="lim n^{1/2} mu_n")
    kind: RegimeKind
    oracle_condition: bool = Field(..., description="n^{1/4} mu_n -> 0")
    rho_limit: ExtendedReal = Field(..., description="lim n^{1/2} mu_n^2")

    @model_validator(mode="after")
    def _kind_matches_m(self) -> "TuningRegime":
        m = self.m_limit
        expected = (
            RegimeKind.CONSISTENT if m.is_pos_inf
            else RegimeKind.DEGENERATE_ZERO if m == 0
            else RegimeKind.CONSERVATIVE
        )
        if m < 0:
            raise ValueError("m_limit cannot be negative")
        if self.kind is not expected:
            raise ValueError(f"kind {self.kind.value} inconsistent with m_limit {m.to_json()}")
        if self.oracle_condition and self.rho_limit != 0:
            raise ValueError("oracle_condition requires rho_limit = 0")
        return self


class LimitTag(str, Enum):
    POINT_MASS = "point_mass"
    SHIFTED_NORMAL = "shifted_normal"
    CONSERVATIVE_MIXTURE = "conservative_mixture"
    ESCAPE_POS = "escape_pos"
    ESCAPE_NEG = "escape_neg"
    STANDARD_NORMAL = "standard_normal"


class LimitDistribution(BaseModel):
    """
    Weak limit of the centered and scaled estimator.

    escape_pos and escape_neg are the sub-distribution limits where all mass
    runs off to -inf (cdf -> 1) or +inf (cdf -> 0).
    """
    tag: LimitTag
    location: ExtendedReal = Field(default_factory=lambda: ExtendedReal.of(0.0))
    shift: float = 0.0
    nu: float = 0.0
    m: float = Field(0.0, ge=0)
    subcase: str = Field("", description="Which branch of the classification fired")

    @classmethod
    def point_mass(cls, location: float, subcase: str = "") -> "LimitDistribution":
        return cls(tag=LimitTag.POINT_MASS, location=ExtendedReal.of(location), subcase=subcase)

    @classmethod
    def shifted_normal(cls, shift: float, subcase: str = "") -> "LimitDistribution":
        return cls(tag=LimitTag.SHIFTED_NORMAL, shift=shift, subcase=subcase)

    @classmethod
    def mixture(cls, nu: float, m: float, subcase: str = "") -> "LimitDistribution":
        return cls(tag=LimitTag.CONSERVATIVE_MIXTURE, nu=nu, m=m, subcase=subcase)

    @classmethod
    def standard_normal(cls, subcase: str = "") -> "LimitDistribution":
        return cls(tag=LimitTag.STANDARD_NORMAL, subcase=subcase)

    @classmethod
    def escape(cls, positive: bool, subcase: str = "") -> "LimitDistribution":
        return cls(tag=LimitTag.ESCAPE_POS if positive else LimitTag.ESCAPE_NEG, subcase=subcase)

    def cdf(self, x):
        """Limit cdf at x (scalar or array)."""
        x_arr = np.asarray(x, dtype=float)
        if self.tag is LimitTag.POINT_MASS:
            out = (x_arr >= self.location.value).astype(float)
        elif self.tag is LimitTag.SHIFTED_NORMAL:
            out = phi_cdf_array(x_arr + self.shift)
        elif self.tag is LimitTag.STANDARD_NORMAL:
            out = phi_cdf_array(x_arr)
        elif self.tag is LimitTag.CONSERVATIVE_MIXTURE:
            out = phi_cdf_array(select_root(self.nu, x_arr, self.m * self.m))
        elif self.tag is LimitTag.ESCAPE_POS:
            out = np.ones_like(x_arr)
        else:
            out = np.zeros_like(x_arr)
        return float(out) if out.ndim == 0 else out

    @property
    def atom(self) -> Optional[float]:
        """Location of a point mass in the limit, if any."""
        if self.tag is LimitTag.POINT_MASS:
            return self.location.value
        if self.tag is LimitTag.CONSERVATIVE_MIXTURE and self.m > 0:
            return -self.nu
        return None

    def describe(self) -> str:
        if self.tag is LimitTag.POINT_MASS:
            return f"point mass at {self.location.to_json()}"
        if self.tag is LimitTag.SHIFTED_NORMAL:
            return f"N(-{self.shift!r}, 1)" if self.shift else "N(0, 1) (oracle)"
        if self.tag is LimitTag.CONSERVATIVE_MIXTURE:
            return f"atom at {-self.nu!r} mixed with continuous part (m={self.m!r})"
        if self.tag is LimitTag.STANDARD_NORMAL:
            return "N(0, 1)"
        if self.tag is LimitTag.ESCAPE_POS:
            return "mass escapes to -inf (cdf -> 1)"
        return "mass escapes to +inf (cdf -> 0)"


class SelectionLimit(BaseModel):
    """Limit of P(theta_hat = 0) together with the case that produced it."""
    probability: float = Field(..., ge=0, le=1)
    case: str

