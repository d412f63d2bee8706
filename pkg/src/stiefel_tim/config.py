"""Run settings read from ``STIEFEL_TIM_*`` environment variables."""

import os
from functools import lru_cache
from typing import Literal

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from .constants import RESIDUAL_TOL
from .enums import SolverName
from .logging import LEVELS


LogFormat = Literal["json", "text"]


class Settings(BaseSettings):
    """Defaults for every command, below CLI flags and above built-in values.

    Environment variables:
        STIEFEL_TIM_SEED: Base seed for every random draw (default: 0)
        STIEFEL_TIM_JOBS: Worker processes for sweeps (default: all cores)
        STIEFEL_TIM_RESTARTS: Random restarts per rank (default: 3)
        STIEFEL_TIM_SOLVER: rtr, rcg or altmin (default: rtr)
        STIEFEL_TIM_RESIDUAL_TOL: Rank acceptance threshold (default: 1e-3)
        STIEFEL_TIM_LOG_LEVEL: Logging level (default: INFO)
        STIEFEL_TIM_LOG_FORMAT: Log format, 'json' or 'text' (default: json)
    """

    model_config = SettingsConfigDict(
        env_prefix="STIEFEL_TIM_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    seed: int = Field(default=0, ge=0, description="Base seed for every random draw")
    jobs: int | None = Field(default=None, ge=1, description="Worker processes for sweeps (None = all cores)")
    restarts: int = Field(default=3, ge=1, le=100, description="Random restarts per rank")
    solver: SolverName = Field(default=SolverName.RTR, description="Default fixed-rank solver")
    residual_tol: float = Field(default=RESIDUAL_TOL, gt=0, description="Rank acceptance threshold on the residual")
    log_level: str = Field(default="INFO", description="Logging level")
    log_format: LogFormat = Field(default="json", description="Log format")

    @field_validator("log_level", mode="before")
    @classmethod
    def normalize_log_level(cls, v: object) -> str:
        """Upper-case the level and check it names a logging level."""
        level = str(v).upper()
        if level not in LEVELS:
            msg = f"Invalid log level: {v}. Must be one of {', '.join(LEVELS)}"
            raise ValueError(msg)
        return level

    @field_validator("log_format", mode="before")
    @classmethod
    def normalize_log_format(cls, v: object) -> str:
        fmt = str(v).lower()
        if fmt not in ("json", "text"):
            msg = f"Invalid log format: {v}. Must be 'json' or 'text'"
            raise ValueError(msg)
        return fmt

    @property
    def workers(self) -> int:
        """Sweep worker processes, falling back to the CPU count."""
        return self.jobs or os.cpu_count() or 1


@lru_cache
def get_settings() -> Settings:
    """Load settings once per process.

    Raises:
        ConfigurationError: If an environment value is invalid
    """
    from .exceptions import ConfigurationError  # noqa: PLC0415

    try:
        return Settings()
    except Exception as e:
        msg = f"Failed to load configuration: {e}"
        raise ConfigurationError(msg) from e
