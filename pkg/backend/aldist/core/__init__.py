# ALDist shared core
from .errors import (
    ALDistError,
    DomainError,
    IndeterminateFormError,
    InconsistentTuningError,
    UnresolvedCaseError,
    DegenerateWeightError,
    ConvergenceError,
    DegenerateBandwidthError,
    ValidationFailure,
)
from .extended import ExtendedReal, POS_INF, NEG_INF
from .normal import NormalFns, phi_cdf, phi_pdf, phi_quantile, normal_interval_prob
from .sequences import PowerLawSequence, ThetaSequence, LimitForm, limit_of

__all__ = [
    "ALDistError",
    "DomainError",
    "IndeterminateFormError",
    "InconsistentTuningError",
    "UnresolvedCaseError",
    "DegenerateWeightError",
    "ConvergenceError",
    "DegenerateBandwidthError",
    "ValidationFailure",
    "ExtendedReal",
    "POS_INF",
    "NEG_INF",
    "NormalFns",
    "phi_cdf",
    "phi_pdf",
    "phi_quantile",
    "normal_interval_prob",
    "PowerLawSequence",
    "ThetaSequence",
    "LimitForm",
    "limit_of",
]
