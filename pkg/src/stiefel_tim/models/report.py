"""Solver run reports."""

from typing import Any

from pydantic import BaseModel, ConfigDict, Field, model_validator

from stiefel_tim.enums import SolverName, SolverStatus, TcgStop


class SolverReport(BaseModel):
    """Per-iteration traces and terminal status of one fixed-rank solve.

    Every trace holds ``iterations + 1`` entries; entry 0 describes the initial point.
    ``step_trace`` holds accepted step lengths for line-search methods and the
    trust-region radius for RTR.
    """

    model_config = ConfigDict(extra="forbid")

    solver: SolverName
    rank: int = Field(ge=1)
    iterations: int = Field(default=0, ge=0)
    objective_trace: list[float] = Field(default_factory=list)
    grad_norm_trace: list[float] = Field(default_factory=list)
    step_trace: list[float] = Field(default_factory=list)
    time_trace: list[float] = Field(default_factory=list, description="Elapsed seconds at each entry")
    status: SolverStatus = SolverStatus.MAX_ITERS
    seconds: float = Field(default=0.0, ge=0)
    inner_iterations: list[int] = Field(default_factory=list, description="tCG iterations per RTR step")
    tcg_stops: list[TcgStop] = Field(default_factory=list)
    accepted: list[bool] = Field(default_factory=list, description="RTR step acceptance per iteration")

    @model_validator(mode="after")
    def validate_trace_lengths(self) -> "SolverReport":
        """Ensure every non-empty trace has iterations + 1 entries."""
        expected = self.iterations + 1
        for name in ("objective_trace", "grad_norm_trace", "step_trace", "time_trace"):
            trace = getattr(self, name)
            if trace and len(trace) != expected:
                msg = f"{name} has {len(trace)} entries, expected {expected}"
                raise ValueError(msg)
        return self

    @property
    def final_cost(self) -> float:
        return self.objective_trace[-1]

    @property
    def final_grad_norm(self) -> float:
        return self.grad_norm_trace[-1]

    def summary(self) -> dict[str, Any]:
        """Compact JSON-ready summary without the traces."""
        return {
            "solver": self.solver.value,
            "rank": self.rank,
            "iterations": self.iterations,
            "status": self.status.value,
            "final_cost": self.final_cost,
            "final_grad_norm": self.final_grad_norm,
            "seconds": self.seconds,
        }
