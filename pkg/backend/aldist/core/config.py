"""
Runtime settings.
"""
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional

from .errors import DomainError

DEFAULT_DATA_DIR = Path(__file__).resolve().parent.parent.parent.parent / "data"


@dataclass(frozen=True)
class Settings:
    seed: int
    threads: int
    log_level: str
    solver_tol: float
    solver_max_iter: int
    data_dir: Path


def load_settings(environ: Optional[Mapping[str, str]] = None) -> Settings:
    env = os.environ if environ is None else environ

    def get_setting(key: str, default: str) -> str:
        val = env.get(key)
        if val is None or not str(val).strip():
            return default
        return str(val).strip()

    try:
        seed = int(get_setting("ALDIST_SEED", "20081201"))
        threads = int(get_setting("ALDIST_THREADS", "1"))
        tol = float(get_setting("ALDIST_SOLVER_TOL", "1e-10"))
        max_iter = int(get_setting("ALDIST_SOLVER_MAX_ITER", "100000"))
    except ValueError as e:
        raise DomainError(f"Invalid ALDIST_* setting: {e}") from e

    if threads < 1:
        raise DomainError(f"ALDIST_THREADS must be >= 1, got {threads}")
    if not tol > 0:
        raise DomainError(f"ALDIST_SOLVER_TOL must be positive, got {tol}")
    if max_iter < 1:
        raise DomainError(f"ALDIST_SOLVER_MAX_ITER must be >= 1, got {max_iter}")

    return Settings(
        seed=seed,
        threads=threads,
        log_level=get_setting("ALDIST_LOG_LEVEL", "WARNING").upper(),
        solver_tol=tol,
        solver_max_iter=max_iter,
        data_dir=Path(get_setting("ALDIST_DATA_DIR", str(DEFAULT_DATA_DIR))),
    )
