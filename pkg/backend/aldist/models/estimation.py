"""
CDF estimator specifications and worst-case experiment reports.
"""
from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field, model_validator

from .location import ScaleKind


class EstimatorKind(str, Enum):
    PRETEST_PLUGIN = "pretest_plugin"
    M_OUT_OF_N_BOOTSTRAP = "m_out_of_n_bootstrap"


class CdfEstimatorSpec(BaseModel):
    kind: EstimatorKind = EstimatorKind.PRETEST_PLUGIN
    pretest_threshold_exponent: float = Field(
        0.25, gt=0, description="Reject theta = 0 when |y_bar| > n^(-exponent)"
    )
    subsample_size: Optional[int] = Field(None, ge=1, description="Bootstrap subsample size m < n")
    bootstrap_reps: int = Field(1000, ge=1)

    @model_validator(mode="after")
    def _bootstrap_needs_m(self) -> "CdfEstimatorSpec":
        if self.kind is EstimatorKind.M_OUT_OF_N_BOOTSTRAP and self.subsample_size is None:
            raise ValueError("m_out_of_n_bootstrap requires subsample_size")
        return self

    def subsample_ratio(self, n: int) -> Optional[float]:
        if self.subsample_size is None:
            return None
        return self.subsample_size / n


class WorstCaseReport(BaseModel):
    """Failure probabilities of a CDF estimator over a theta grid near the oscillation point."""
    estimator: EstimatorKind
    scale: ScaleKind
    n: int = Field(..., ge=1)
    mu: float = Field(..., gt=0)
    t: float
    c: float = Field(..., gt=0)
    epsilon: float = Field(..., gt=0)
    reps: int = Field(..., ge=1)
    seed: int
    theta_grid: list[float]
    failure_prob_by_theta: list[float]
    sup_failure_prob: float = Field(..., ge=0, le=1)
    theory_epsilon_bound: float
    subsample_ratio: Optional[float] = None
    subsample_tuning: Optional[str] = Field(None, description="mu rule reused on subsamples")

    @model_validator(mode="after")
    def _sup_is_max(self) -> "WorstCaseReport":
        if len(self.theta_grid) != len(self.failure_prob_by_theta):
            raise ValueError("theta_grid and failure_prob_by_theta differ in length")
        if self.failure_prob_by_theta and self.sup_failure_prob != max(self.failure_prob_by_theta):
            raise ValueError("sup_failure_prob must equal the grid maximum")
        return self

    def to_summary(self) -> dict:
        return {
            "estimator": self.estimator.value,
            "scale": self.scale.value,
            "sup_failure_prob": self.sup_failure_prob,
            "theory_epsilon_bound": self.theory_epsilon_bound,
            "epsilon": self.epsilon,
            "grid_size": len(self.theta_grid),
        }
