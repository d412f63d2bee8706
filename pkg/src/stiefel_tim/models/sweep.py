"""Parameter sweep configuration and result rows."""

import json
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from stiefel_tim import constants
from stiefel_tim.enums import AcceptanceRule, ChannelModel, SolverName, SweepVariable
from stiefel_tim.exceptions import InputError

from .base import FrozenModel
from .common import Count, Probability


class SweepConfig(FrozenModel):
    """Grid of (p, q or transmit power) values with trials per point.

    The variable being swept takes its values from ``values``; the other two keep
    the fixed values ``p``, ``q`` and ``power``.
    """

    K: Count = Field(description="Users per random topology")
    d: Count = Field(default=1, description="Streams per user")
    variable: SweepVariable = Field(description="Swept parameter: p, q or P")
    values: list[float] = Field(min_length=1, description="Grid values")
    trials: Count = Field(default=constants.DEFAULT_TRIALS, description="Trials per grid point")
    solvers: list[SolverName] = Field(default_factory=lambda: [SolverName.RTR], min_length=1)
    seed: int = Field(default=0, ge=0)
    p: Probability = Field(default=0.3, description="Connection probability when not swept")
    q: Probability = Field(default=1.0, description="Sharing probability when not swept")
    power: float = Field(default=1.0, gt=0, description="Transmit power when not swept")
    channel_model: ChannelModel = Field(default=ChannelModel.GENERIC_GAUSSIAN)
    restarts: Count = Field(default=3)
    acceptance: AcceptanceRule = Field(default=AcceptanceRule.RESIDUAL)
    residual_tol: float = Field(default=constants.RESIDUAL_TOL, gt=0)
    max_rank: int | None = Field(default=None, ge=1)
    record_timing: bool = Field(default=False, description="Fill the seconds column with wall-clock time")

    @model_validator(mode="after")
    def validate_grid(self) -> "SweepConfig":
        """Ensure grid values are probabilities for p/q sweeps and positive for power sweeps."""
        if self.variable is SweepVariable.POWER:
            if any(v <= 0 for v in self.values):
                msg = "transmit power values must be positive"
                raise ValueError(msg)
        elif any(not 0.0 <= v <= 1.0 for v in self.values):
            msg = f"{self.variable.value} values must lie in [0, 1]"
            raise ValueError(msg)
        return self

    def point(self, value: float) -> tuple[float, float, float]:
        """Return (p, q, power) at a grid value."""
        if self.variable is SweepVariable.P:
            return value, self.q, self.power
        if self.variable is SweepVariable.Q:
            return self.p, value, self.power
        return self.p, self.q, value

    @classmethod
    def from_file(
        cls,
        path: str | Path,
        defaults: dict[str, Any] | None = None,
        **overrides: Any,  # noqa: ANN401
    ) -> "SweepConfig":
        """Load a config from JSON.

        ``defaults`` fill keys the file leaves out; non-None ``overrides`` replace
        whatever the file says.

        Raises:
            InputError: If the file is unreadable, not JSON or invalid
        """
        p = Path(path)
        try:
            data = json.loads(p.read_text(encoding="utf-8"))
            if not isinstance(data, dict):
                msg = "Sweep config must be a JSON object"
                raise InputError(msg, path=str(p))
            for key, value in (defaults or {}).items():
                data.setdefault(key, value)
            data.update({key: value for key, value in overrides.items() if value is not None})
            return cls.model_validate(data)
        except OSError as e:
            msg = f"Cannot read sweep config ({e.strerror})"
            raise InputError(msg, path=str(p)) from e
        except json.JSONDecodeError as e:
            msg = f"Sweep config is not valid JSON (line {e.lineno})"
            raise InputError(msg, path=str(p)) from e
        except ValidationError as e:
            first = e.errors()[0]
            where = ".".join(str(part) for part in first["loc"]) or "config"
            msg = f"Invalid sweep config {where}: {first['msg']}"
            raise InputError(msg, path=str(p)) from e


class SweepRow(BaseModel):
    """One (grid value, solver, trial) outcome; failed trials leave metrics empty."""

    model_config = ConfigDict(extra="forbid")

    sweep_var: SweepVariable
    value: float
    solver: SolverName
    trial: int = Field(ge=0)
    rank: int | None = None
    dof: float | None = None
    residual: float | None = None
    leakage: float | None = None
    sum_rate: float | None = None
    iters: int | None = None
    seconds: float | None = None

    @property
    def failed(self) -> bool:
        return self.rank is None

    def csv_cells(self) -> list[str]:
        """Cells in column order; missing values become empty cells."""
        cells: list[str] = []
        for column in constants.SWEEP_CSV_COLUMNS:
            raw = getattr(self, column)
            if raw is None:
                cells.append("")
            elif isinstance(raw, (SweepVariable, SolverName)):
                cells.append(raw.value)
            else:
                cells.append(repr(raw) if isinstance(raw, float) else str(raw))
        return cells


class MetricSummary(BaseModel):
    """Mean and standard error of one metric over successful trials."""

    mean: float | None = None
    stderr: float | None = None
    count: int = 0


class SweepSummaryRow(BaseModel):
    """Aggregate of every trial at one (grid value, solver)."""

    sweep_var: SweepVariable
    value: float
    solver: SolverName
    trials: int
    failed: int
    metrics: dict[str, MetricSummary]


class SweepResult(BaseModel):
    """All trial rows plus per-point summaries."""

    config: SweepConfig
    rows: list[SweepRow]
    summary: list[SweepSummaryRow]

    @property
    def all_failed(self) -> bool:
        return all(row.failed for row in self.rows)

    def summary_json(self) -> str:
        """Serialize config and summary rows."""
        payload = {
            "config": self.config.model_dump(mode="json"),
            "summary": [row.model_dump(mode="json") for row in self.summary],
        }
        return json.dumps(payload, indent=2, sort_keys=True)
