"""
Linear regression problem and adaptive LASSO fit models.
"""
import math
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

RANK_TOL = 1e-10


class RegressionProblem(BaseModel):
    """Y = X theta + u with u ~ N(0, sigma^2 I)."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    design: np.ndarray = Field(..., description="n x k design matrix of full column rank")
    response: np.ndarray = Field(..., description="Response vector of length n")
    sigma: float = Field(1.0, gt=0, description="Noise standard deviation")

    @field_validator("design")
    @classmethod
    def _design_matrix(cls, v) -> np.ndarray:
        x = np.asarray(v, dtype=float)
        if x.ndim != 2 or x.shape[0] == 0 or x.shape[1] == 0:
            raise ValueError(f"design must be a non-empty 2-D array, got shape {x.shape}")
        if not np.all(np.isfinite(x)):
            raise ValueError("design contains non-finite entries")
        return x

    @field_validator("response")
    @classmethod
    def _response_vector(cls, v) -> np.ndarray:
        y = np.asarray(v, dtype=float).reshape(-1)
        if not np.all(np.isfinite(y)):
            raise ValueError("response contains non-finite entries")
        return y

    @model_validator(mode="after")
    def _shapes_and_rank(self) -> "RegressionProblem":
        n, k = self.design.shape
        if self.response.shape[0] != n:
            raise ValueError(f"response has length {self.response.shape[0]}, design has {n} rows")
        if k > n:
            raise ValueError(f"design has more columns ({k}) than rows ({n})")
        sv = np.linalg.svd(self.design, compute_uv=False)
        if sv[-1] <= RANK_TOL * sv[0]:
            raise ValueError(
                f"design is rank deficient (smallest/largest singular value {sv[-1] / sv[0]:.3e})"
            )
        return self

    @property
    def n(self) -> int:
        return self.design.shape[0]

    @property
    def k(self) -> int:
        return self.design.shape[1]


class AdaptiveLassoFit(BaseModel):
    """Minimizer of the adaptive LASSO objective together with its LS start."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    estimate: np.ndarray
    ls_estimate: np.ndarray
    active_set: np.ndarray
    mu: float = Field(..., gt=0)
    iterations: int = Field(0, ge=0, description="Coordinate-descent cycles; 0 for closed form")
    objective_trace: list[float] = Field(default_factory=list)

    @model_validator(mode="after")
    def _active_matches_estimate(self) -> "AdaptiveLassoFit":
        est = np.asarray(self.estimate, dtype=float)
        active = np.asarray(self.active_set, dtype=bool)
        if est.shape != active.shape or est.shape != np.shape(self.ls_estimate):
            raise ValueError("estimate, ls_estimate and active_set must have equal length")
        if np.any((est != 0) != active):
            raise ValueError("active_set must flag exactly the nonzero components")
        return self

    @property
    def objective(self) -> Optional[float]:
        return self.objective_trace[-1] if self.objective_trace else None

    def to_summary(self) -> dict:
        return {
            "estimate": [float(v) for v in self.estimate],
            "ls_estimate": [float(v) for v in self.ls_estimate],
            "active_set": [bool(v) for v in self.active_set],
            "mu": self.mu,
            "iterations": self.iterations,
            "objective": self.objective if self.objective is None or math.isfinite(self.objective) else None,
        }
