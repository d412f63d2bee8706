"""Rank search results and beamformer sets."""

from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from stiefel_tim.enums import AcceptanceRule, SolverName
from stiefel_tim.manifold import FactorPoint

from .base import ArrayModel, ComplexArray
from .report import SolverReport


class RankAttempt(BaseModel):
    """Summary of all restarts at one rank."""

    model_config = ConfigDict(extra="forbid")

    rank: int = Field(ge=1)
    attempts: int = Field(ge=0, description="Restarts that ran")
    failures: int = Field(default=0, ge=0, description="Restarts that raised instead of returning")
    best_residual: float | None = Field(default=None, description="Smallest m^{-1/2} residual over restarts")
    best_cost: float | None = Field(default=None, description="Smallest f(Y) over restarts")
    iterations: int = Field(default=0, ge=0, description="Solver iterations summed over restarts")
    accepted: bool = False

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "rank": self.rank,
            "attempts": self.attempts,
            "best_residual": self.best_residual,
            "iterations": self.iterations,
        }


class RankSearchResult(ArrayModel):
    """Smallest accepted rank with its solution.

    ``dof[k]·rank == d_k`` for every user.
    """

    rank: int = Field(ge=1)
    X: ComplexArray
    point: FactorPoint | None = Field(default=None, description="Factor Y = [L; R] (None for no factor)")
    dof: list[float]
    residual: float
    cost: float
    solver: SolverName
    acceptance: AcceptanceRule = AcceptanceRule.RESIDUAL
    reports: list[SolverReport] = Field(default_factory=list, description="Best report per attempted rank")
    per_rank: list[RankAttempt] = Field(default_factory=list)

    @property
    def iterations(self) -> int:
        """Solver iterations summed over every attempted rank and restart."""
        return sum(a.iterations for a in self.per_rank)

    def to_json_dict(self) -> dict[str, Any]:
        """Serialize to the result file layout."""
        return {
            "rank": self.rank,
            "dof": self.dof,
            "residual": self.residual,
            "cost": self.cost,
            "solver": self.solver.value,
            "acceptance": self.acceptance.value,
            "per_rank": [a.to_json_dict() for a in self.per_rank],
        }


class BeamformerSet(ArrayModel):
    """Receive filters U_k (r×d_k) and precoders V_ji (r×d_i) for i ∈ S_j.

    ``precoders`` is keyed by 0-based (transmitter j, message i).
    """

    rank: int = Field(ge=1)
    d: list[int] = Field(description="Streams per user")
    receive: list[ComplexArray]
    precoders: dict[tuple[int, int], ComplexArray]

    @model_validator(mode="after")
    def validate_shapes(self) -> "BeamformerSet":
        """Ensure every matrix has ``rank`` rows and finite entries."""
        for mat in [*self.receive, *self.precoders.values()]:
            if mat.ndim != 2 or mat.shape[0] != self.rank:  # noqa: PLR2004
                msg = f"beamformer of shape {mat.shape} does not have {self.rank} rows"
                raise ValueError(msg)
            if not np.all(np.isfinite(mat)):
                msg = "beamformer has non-finite entries"
                raise ValueError(msg)
        return self

    def precoder(self, j: int, i: int) -> ComplexArray:
        """Return V_ji, or zeros if message i is not available at transmitter j."""
        key = (j, i)
        if key in self.precoders:
            return self.precoders[key]
        return np.zeros((self.rank, self.d[i]), dtype=np.complex128)

    def scaled(self, factor: float) -> "BeamformerSet":
        """Return a copy with every precoder multiplied by ``factor``."""
        return BeamformerSet(
            rank=self.rank,
            d=self.d,
            receive=self.receive,
            precoders={key: factor * v for key, v in self.precoders.items()},
        )

    def to_npz_arrays(self) -> dict[str, ComplexArray]:
        """Name arrays ``U_k`` and ``V_j_i`` with 1-based indices."""
        arrays = {f"U_{k + 1}": u for k, u in enumerate(self.receive)}
        arrays.update({f"V_{j + 1}_{i + 1}": v for (j, i), v in sorted(self.precoders.items())})
        return arrays
