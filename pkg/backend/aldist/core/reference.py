"""
Reference data loading from data/reference/*.json.
"""
import copy
import json
from pathlib import Path
from typing import Any, Optional

import numpy as np

from .config import load_settings
from .log import get_logger

logger = get_logger(__name__)

# Used when a reference file is missing; the JSON files carry the same values.
BUILTIN_STUDY_DEFAULTS: dict[str, Any] = {
    "design": {"n": 100, "k": 4, "rho": 0.5},
    "replications": 1000,
    "fixed_tuning": {"coef": 1.0, "exponent": 1.0 / 3.0},
    "cross_validation": {"folds": 10, "grid": {"start_exp": -3.0, "stop_exp": 0.0, "num": 25}},
}

BUILTIN_VALIDATION_SETTINGS: dict[str, Any] = {
    "worked_example": {"n": 10, "theta": 0.1, "mu": 0.05},
    "dkw": {"alpha": 0.01},
    "regime_table": {"n": 1000000, "probes": [-1.5, -0.5, 0.5, 1.5], "tolerance": 0.02},
    "n_grid": [100, 10000, 1000000],
    "profiles": {
        "quick": {"draws": 200000, "replications": 200, "worst_case_reps": 1000, "random_inputs": 2000},
        "full": {"draws": 1000000, "replications": 1000, "worst_case_reps": 4000, "random_inputs": 10000},
    },
}


class ReferenceData:
    """Study and validation constants shipped with the repository."""

    def __init__(self, data_dir: Optional[Path] = None):
        self.data_dir = Path(data_dir) if data_dir is not None else load_settings().data_dir
        self._load_reference_data()

    def _load_reference_data(self):
        ref_dir = self.data_dir / "reference"

        self.study_defaults = self._load(ref_dir / "study_defaults.json", BUILTIN_STUDY_DEFAULTS)
        self.validation_settings = self._load(
            ref_dir / "validation_settings.json", BUILTIN_VALIDATION_SETTINGS
        )

    @staticmethod
    def _load(path: Path, fallback: dict[str, Any]) -> dict[str, Any]:
        merged = copy.deepcopy(fallback)
        try:
            with open(path) as f:
                loaded = json.load(f)
        except FileNotFoundError:
            logger.debug("Reference file %s not found, using built-in defaults", path)
            return merged
        for key, value in loaded.items():
            if key in ("description", "notes"):
                continue
            merged[key] = value
        return merged

    def profile(self, name: str) -> dict[str, Any]:
        profiles = self.validation_settings["profiles"]
        if name not in profiles:
            raise KeyError(f"Unknown validation profile '{name}'")
        return profiles[name]

    def cv_grid(self) -> list[float]:
        grid = self.study_defaults["cross_validation"]["grid"]
        return np.logspace(grid["start_exp"], grid["stop_exp"], int(grid["num"])).tolist()


def default_cv_grid() -> list[float]:
    """Cross-validation grid from the shipped study defaults."""
    return ReferenceData().cv_grid()
