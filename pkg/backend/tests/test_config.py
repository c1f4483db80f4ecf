import json
import logging

import pytest

from aldist.core.config import DEFAULT_DATA_DIR, load_settings
from aldist.core.errors import DomainError
from aldist.core.log import StderrHandler, configure_logging, get_logger
from aldist.core.reference import ReferenceData
from aldist.core.rng import child_seed, replication_rng
from aldist.models.location import LocationModel
from aldist.models.study import TuningChoice, TuningKind


def test_settings_defaults():
    s = load_settings({})
    assert s.seed == 20081201
    assert s.threads == 1
    assert s.log_level == "WARNING"
    assert s.solver_tol == 1e-10
    assert s.solver_max_iter == 100000
    assert s.data_dir == DEFAULT_DATA_DIR


def test_settings_from_environment(tmp_path):
    s = load_settings({
        "ALDIST_SEED": "42",
        "ALDIST_THREADS": "4",
        "ALDIST_LOG_LEVEL": "debug",
        "ALDIST_SOLVER_TOL": "1e-8",
        "ALDIST_DATA_DIR": str(tmp_path),
    })
    assert (s.seed, s.threads, s.log_level, s.solver_tol) == (42, 4, "DEBUG", 1e-8)
    assert s.data_dir == tmp_path


def test_blank_settings_fall_back_to_defaults():
    assert load_settings({"ALDIST_SEED": "  "}).seed == 20081201


@pytest.mark.parametrize("env", [
    {"ALDIST_SEED": "abc"},
    {"ALDIST_THREADS": "0"},
    {"ALDIST_SOLVER_TOL": "-1"},
    {"ALDIST_SOLVER_MAX_ITER": "0"},
])
def test_invalid_settings_raise(env):
    with pytest.raises(DomainError):
        load_settings(env)


def test_reference_data_ships_with_repo():
    ref = ReferenceData(DEFAULT_DATA_DIR)
    assert ref.study_defaults["design"] == {"n": 100, "k": 4, "rho": 0.5}
    assert ref.validation_settings["worked_example"]["theta"] == 0.1
    assert ref.profile("quick")["replications"] < ref.profile("full")["replications"]
    grid = ref.cv_grid()
    assert len(grid) == 25
    assert grid[0] == pytest.approx(1e-3) and grid[-1] == pytest.approx(1.0)


def test_reference_data_falls_back_when_files_missing(tmp_path):
    ref = ReferenceData(tmp_path)
    assert ref.profile("full")["draws"] == 1000000
    assert ref.study_defaults["replications"] == 1000


def test_reference_data_file_overrides_builtin(tmp_path):
    ref_dir = tmp_path / "reference"
    ref_dir.mkdir()
    (ref_dir / "validation_settings.json").write_text(json.dumps({
        "description": "ignored",
        "n_grid": [10, 20],
    }))
    ref = ReferenceData(tmp_path)
    assert ref.validation_settings["n_grid"] == [10, 20]
    assert "description" not in ref.validation_settings
    assert "profiles" in ref.validation_settings


def test_unknown_profile():
    with pytest.raises(KeyError):
        ReferenceData(DEFAULT_DATA_DIR).profile("medium")


def test_configure_logging_attaches_one_handler(monkeypatch):
    root = logging.getLogger("aldist")
    monkeypatch.setattr(root, "handlers", [h for h in root.handlers if not isinstance(h, StderrHandler)])
    configure_logging("INFO")
    configure_logging("DEBUG")
    assert len([h for h in root.handlers if isinstance(h, StderrHandler)]) == 1
    assert root.level == logging.DEBUG
    assert get_logger("aldist.services.montecarlo").getEffectiveLevel() == logging.DEBUG
    configure_logging("WARNING")


def test_replication_streams_are_reproducible_and_distinct():
    a = replication_rng(5, 0).standard_normal(4)
    b = replication_rng(5, 0).standard_normal(4)
    c = replication_rng(5, 1).standard_normal(4)
    assert (a == b).all()
    assert not (a == c).any()


def test_child_seed_is_deterministic():
    assert child_seed(replication_rng(1, 2)) == child_seed(replication_rng(1, 2))
    assert 0 <= child_seed(replication_rng(1, 2)) < 2 ** 31


def test_log_records_follow_current_stderr(capsys):
    configure_logging("INFO")
    get_logger("aldist.tests").info("hello from the study")
    assert "hello from the study" in capsys.readouterr().err
    configure_logging("WARNING")


def test_cross_validation_grid_has_one_source():
    grid = ReferenceData(DEFAULT_DATA_DIR).cv_grid()
    assert TuningChoice(kind=TuningKind.CROSS_VALIDATED).grid == grid
    assert len(grid) == 25 and grid[0] == pytest.approx(1e-3) and grid[-1] == pytest.approx(1.0)
    assert LocationModel.model_config["json_schema_extra"]["example"]["n"] == 10
