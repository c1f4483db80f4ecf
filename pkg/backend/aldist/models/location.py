"""
Gaussian location model and its exact finite-sample law.
"""
import math
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class ScaleKind(str, Enum):
    """Centering/scaling of the estimator."""
    SQRT_N = "sqrt_n"  # n^{1/2} (theta_hat - theta), cdf F
    INV_MU = "inv_mu"  # mu^{-1} (theta_hat - theta), cdf G


class LocationModel(BaseModel):
    """The (n, theta, mu) triple every exact formula consumes."""
    n: int = Field(..., ge=1, description="Sample size")
    theta: float = Field(..., description="True location")
    mu: float = Field(..., gt=0, description="Tuning parameter mu_n")

    @field_validator("theta", "mu")
    @classmethod
    def _finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("must be finite")
        return v

    @property
    def sqrt_n(self) -> float:
        return math.sqrt(self.n)

    @property
    def sqrt_n_theta(self) -> float:
        return math.sqrt(self.n) * self.theta

    @property
    def sqrt_n_mu(self) -> float:
        return math.sqrt(self.n) * self.mu

    @property
    def n_mu_sq(self) -> float:
        return self.n * self.mu * self.mu

    model_config = ConfigDict(
        json_schema_extra={"example": {"n": 10, "theta": 0.1, "mu": 0.05}}
    )


class RootPair(BaseModel):
    """Roots z1 <= z2 of the quadratic behind the exact cdf."""
    z1: float
    z2: float

    @model_validator(mode="after")
    def _ordered(self) -> "RootPair":
        if self.z1 > self.z2:
            raise ValueError(f"z1={self.z1} exceeds z2={self.z2}")
        return self


class FiniteSampleDist(BaseModel):
    """Atom plus absolutely continuous part of the exact law."""
    model: LocationModel
    scale: ScaleKind = ScaleKind.SQRT_N
    atom_location: float = Field(..., description="-n^{1/2} theta for F, -theta/mu for G")
    atom_mass: float = Field(..., ge=0, le=1, description="P(theta_hat = 0)")
    continuous_mass: float = Field(..., ge=0, le=1)

    def to_summary(self) -> dict:
        return {
            "n": self.model.n,
            "theta": self.model.theta,
            "mu": self.model.mu,
            "scale": self.scale.value,
            "atom_location": self.atom_location,
            "atom_mass": self.atom_mass,
        }
