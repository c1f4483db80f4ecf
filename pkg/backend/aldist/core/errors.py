"""
ALDist exception hierarchy.
"""
from typing import Optional

import numpy as np


class ALDistError(Exception):
    """Base class for every error raised by the library."""


class DomainError(ALDistError, ValueError):
    """Input outside the domain of an operation."""


class IndeterminateFormError(DomainError):
    """Extended-real arithmetic produced an indeterminate form."""


class InconsistentTuningError(DomainError):
    """Tuning sequence does not tend to zero."""


class UnresolvedCaseError(ALDistError):
    """A limit subcase that cannot be decided exactly within the sequence family."""


class DegenerateWeightError(ALDistError):
    """A least-squares coefficient is zero, so its adaptive weight is undefined."""


class ConvergenceError(ALDistError):
    """Coordinate descent hit its iteration cap."""

    def __init__(self, message: str, last_iterate: Optional[np.ndarray] = None, iterations: int = 0):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.iterations = iterations


class DegenerateBandwidthError(DomainError):
    """Kernel smoothing requested on data with zero spread."""


class ValidationFailure(ALDistError):
    """One or more checks of the invariant suite failed."""

    def __init__(self, message: str, failed: Optional[list[str]] = None):
        super().__init__(message)
        self.failed = failed or []


# Exit codes used by the command line front end
USAGE_ERRORS = (DomainError,)
NUMERICAL_ERRORS = (
    UnresolvedCaseError,
    DegenerateWeightError,
    ConvergenceError,
    ValidationFailure,
)
