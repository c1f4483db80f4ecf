import math

import numpy as np
import pytest

from aldist.core.sequences import PowerLawSequence
from aldist.models.location import LocationModel
from aldist.models.regression import RegressionProblem
from aldist.models.study import StudyConfig, TuningChoice, TuningKind
from aldist.services.montecarlo import build_design


@pytest.fixture
def worked_example_model():
    """n = 10, theta = 0.1, mu = 0.05: atom at -0.3162."""
    return LocationModel(n=10, theta=0.1, mu=0.05)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def orthogonal_problem(rng):
    design = build_design(100, 4, 0.0)
    theta = np.array([1.0, -0.5, 0.05, 0.0])
    return RegressionProblem(design=design, response=design @ theta + rng.standard_normal(100))


@pytest.fixture
def correlated_problem(rng):
    design = build_design(100, 4, 0.5)
    theta = np.array([3.0, 1.5, 0.0, 0.0])
    return RegressionProblem(design=design, response=design @ theta + rng.standard_normal(100))


@pytest.fixture
def cube_root_rule():
    return PowerLawSequence(coef=1.0, exponent=1.0 / 3.0)


@pytest.fixture
def small_study():
    return StudyConfig(
        replications=120,
        seed=7,
        kde=False,
        tuning=TuningChoice(kind=TuningKind.FIXED, mu_rule=PowerLawSequence(coef=1.0, exponent=1.0 / 3.0)),
    )


@pytest.fixture
def erf_interval():
    """Phi(b) - Phi(a) through math.erf, an oracle independent of scipy."""
    def interval(a: float, b: float) -> float:
        return 0.5 * (math.erf(b / math.sqrt(2.0)) - math.erf(a / math.sqrt(2.0)))
    return interval
