"""
Command-line run metadata.
"""
from enum import Enum
from typing import Any

from pydantic import BaseModel, Field


class Subcommand(str, Enum):
    ESTIMATE = "estimate"
    DIST = "dist"
    SELPROB = "selprob"
    LIMIT = "limit"
    RATE = "rate"
    IMPOSSIBILITY = "impossibility"
    MONTECARLO = "montecarlo"
    VALIDATE = "validate"


class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"


class RunMetadata(BaseModel):
    """Header written with every run; ``params`` replays the run via --config."""
    version: str
    subcommand: Subcommand
    seed: int
    params: dict[str, Any] = Field(default_factory=dict)
