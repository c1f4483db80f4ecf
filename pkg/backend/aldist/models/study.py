"""
Monte Carlo study configuration and result models.
"""
import math
from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..core.errors import DomainError
from ..core.reference import default_cv_grid
from ..core.sequences import PowerLawSequence


class TuningKind(str, Enum):
    FIXED = "fixed"
    CROSS_VALIDATED = "cross_validated"


class ThetaPattern(str, Enum):
    CANONICAL = "canonical"      # (3, 1.5, g/sqrt(n), g/sqrt(n), ...)
    THIRD_ONLY = "third_only"    # (3, 1.5, g/sqrt(n), 0, ...)
    FOURTH_ONLY = "fourth_only"  # (3, 1.5, 0, g/sqrt(n), ...)
    CUSTOM = "custom"


class TuningChoice(BaseModel):
    """Fixed mu from a power-law rule, or K-fold cross-validation over a grid."""
    kind: TuningKind = TuningKind.FIXED
    mu_rule: Optional[PowerLawSequence] = None
    folds: int = Field(10, ge=2)
    grid: list[float] = Field(default_factory=default_cv_grid)

    @field_validator("grid")
    @classmethod
    def _positive_grid(cls, v: list[float]) -> list[float]:
        if any(not (g > 0 and math.isfinite(g)) for g in v):
            raise ValueError("grid values must be positive and finite")
        return v

    @model_validator(mode="after")
    def _rule_for_fixed(self) -> "TuningChoice":
        if self.kind is TuningKind.FIXED and self.mu_rule is None:
            raise ValueError("fixed tuning requires mu_rule")
        return self

    @classmethod
    def parse(cls, text: str) -> "TuningChoice":
        """
        Parse a tuning flag.

        ``fixed:n^-1/3`` or ``fixed:0.1`` for a fixed rule, ``cv`` or ``cv:5``
        for cross-validation with the given number of folds.
        """
        head, _, tail = text.strip().partition(":")
        head = head.lower()
        if head == "fixed":
            if not tail:
                raise DomainError("fixed tuning needs a rule, e.g. fixed:n^-1/3")
            return cls(kind=TuningKind.FIXED, mu_rule=PowerLawSequence.parse(tail))
        if head in ("cv", "cross_validated"):
            try:
                folds = int(tail) if tail else 10
            except ValueError as exc:
                raise DomainError(f"cv folds must be an integer, got '{tail}'") from exc
            return cls(kind=TuningKind.CROSS_VALIDATED, folds=folds)
        raise DomainError(f"Unknown tuning '{text}'; use fixed:<rule> or cv[:folds]")

    def describe(self) -> str:
        if self.kind is TuningKind.FIXED:
            return f"fixed:{self.mu_rule}"
        return f"cv:{self.folds}"


class StudyConfig(BaseModel):
    n: int = Field(100, ge=2)
    k: int = Field(4, ge=1)
    rho: float = Field(0.5, gt=-1, lt=1)
    gamma: float = Field(0.0, ge=0)
    theta_pattern: ThetaPattern = ThetaPattern.CANONICAL
    custom_theta: Optional[list[float]] = None
    tuning: TuningChoice = Field(
        default_factory=lambda: TuningChoice(mu_rule=PowerLawSequence(coef=1.0, exponent=1.0 / 3.0))
    )
    replications: int = Field(1000, ge=1)
    seed: int = 20081201
    kde: bool = True

    @model_validator(mode="after")
    def _block_structure(self) -> "StudyConfig":
        if self.n % self.k != 0:
            raise ValueError(f"n={self.n} must be divisible by k={self.k}")
        if self.theta_pattern is ThetaPattern.CUSTOM:
            if self.custom_theta is None or len(self.custom_theta) != self.k:
                raise ValueError(f"custom theta pattern needs exactly k={self.k} values")
        elif self.k < 4 and self.theta_pattern is ThetaPattern.FOURTH_ONLY:
            raise ValueError("fourth_only pattern needs k >= 4")
        elif self.k < 3:
            raise ValueError("built-in theta patterns need k >= 3")
        return self

    def theta_vector(self) -> np.ndarray:
        if self.theta_pattern is ThetaPattern.CUSTOM:
            return np.asarray(self.custom_theta, dtype=float)
        small = self.gamma / math.sqrt(self.n)
        theta = np.zeros(self.k)
        theta[0], theta[1] = 3.0, 1.5
        if self.theta_pattern is ThetaPattern.CANONICAL:
            theta[2:] = small
        elif self.theta_pattern is ThetaPattern.THIRD_ONLY:
            theta[2] = small
        else:
            theta[3] = small
        return theta

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "n": 100,
                "k": 4,
                "rho": 0.5,
                "gamma": 0.0,
                "tuning": {"kind": "fixed", "mu_rule": {"coef": 1.0, "exponent": 0.3333333333333333}},
                "replications": 1000,
                "seed": 20081201,
            }
        }
    )


class MarginalSummary(BaseModel):
    """Zero frequency plus the centered/scaled nonzero values of one component."""
    component: int = Field(..., ge=1, description="1-based coordinate index")
    theta: float
    scaling_constant: float = Field(..., gt=0, description="C_jj^{-1/2}")
    replications: int = Field(..., ge=0)
    zero_count: int = Field(..., ge=0)
    zero_frequency: float = Field(..., ge=0, le=1)
    atom_location: float
    nonzero_values: list[float]
    median_nonzero: Optional[float] = None
    kde_x: Optional[list[float]] = None
    kde_density: Optional[list[float]] = None

    @model_validator(mode="after")
    def _counts(self) -> "MarginalSummary":
        if self.zero_count > self.replications:
            raise ValueError("zero_count exceeds replications")
        if self.replications and abs(self.zero_frequency * self.replications - self.zero_count) > 1e-9:
            raise ValueError("zero_frequency must equal zero_count / replications")
        return self

    def to_summary(self) -> dict:
        return {
            "component": self.component,
            "zero_frequency": self.zero_frequency,
            "atom_location": self.atom_location,
            "median_nonzero": self.median_nonzero,
        }


class StudyResult(BaseModel):
    config: StudyConfig
    theta: list[float]
    scaling_constants: list[float]
    summaries: list[MarginalSummary]
    estimates: list[Optional[list[float]]] = Field(
        ..., description="Per-replication estimates; None where the solver failed"
    )
    mu_used: list[Optional[float]]
    failures: int = Field(0, ge=0)

    def zero_frequencies(self) -> list[float]:
        return [s.zero_frequency for s in self.summaries]

    def median_mu(self) -> Optional[float]:
        used = [m for m in self.mu_used if m is not None]
        return float(np.median(used)) if used else None
