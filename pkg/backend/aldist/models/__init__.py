# ALDist data models
from .location import LocationModel, FiniteSampleDist, RootPair, ScaleKind
from .regression import RegressionProblem, AdaptiveLassoFit
from .asymptotics import TuningRegime, RegimeKind, LimitDistribution, LimitTag, SelectionLimit
from .estimation import CdfEstimatorSpec, EstimatorKind, WorstCaseReport
from .study import (
    StudyConfig,
    TuningChoice,
    TuningKind,
    ThetaPattern,
    MarginalSummary,
    StudyResult,
)
from .run import RunMetadata, Subcommand, OutputFormat

__all__ = [
    "LocationModel",
    "FiniteSampleDist",
    "RootPair",
    "ScaleKind",
    "RegressionProblem",
    "AdaptiveLassoFit",
    "TuningRegime",
    "RegimeKind",
    "LimitDistribution",
    "LimitTag",
    "SelectionLimit",
    "CdfEstimatorSpec",
    "EstimatorKind",
    "WorstCaseReport",
    "StudyConfig",
    "TuningChoice",
    "TuningKind",
    "ThetaPattern",
    "MarginalSummary",
    "StudyResult",
    "RunMetadata",
    "Subcommand",
    "OutputFormat",
]
