"""Solver options, loadable from a JSON options file."""

import json
from pathlib import Path

from pydantic import Field, ValidationError, model_validator

from stiefel_tim import constants
from stiefel_tim.enums import BetaRule
from stiefel_tim.exceptions import InputError

from .base import FrozenModel
from .common import PositiveReal, UnitInterval


class ArmijoOptions(FrozenModel):
    """Backtracking line search parameters."""

    c1: UnitInterval = Field(default=constants.ARMIJO_C1, description="Sufficient-decrease constant")
    backtrack: UnitInterval = Field(default=constants.ARMIJO_BACKTRACK, description="Step shrink factor")
    initial_step: PositiveReal = Field(default=constants.ARMIJO_INITIAL_STEP, description="First trial step")
    max_backtracks: int = Field(default=constants.ARMIJO_MAX_BACKTRACKS, ge=1, description="Backtracks per search")


class TrustRegionOptions(FrozenModel):
    """Trust-region radius control."""

    delta0: PositiveReal = Field(default=constants.TR_DELTA0, description="Initial radius Δ₀")
    delta_max: PositiveReal = Field(default=constants.TR_DELTA_MAX, description="Largest radius Δ_max")
    rho_accept: float = Field(default=constants.TR_RHO_ACCEPT, ge=0, lt=0.25, description="Accept iff ρ > this")
    rho_shrink: UnitInterval = Field(default=constants.TR_RHO_SHRINK, description="Shrink when ρ < this")
    rho_expand: UnitInterval = Field(default=constants.TR_RHO_EXPAND, description="Expand when ρ > this on boundary")
    shrink_factor: UnitInterval = Field(default=constants.TR_SHRINK_FACTOR, description="Radius multiplier on shrink")
    expand_factor: float = Field(default=constants.TR_EXPAND_FACTOR, gt=1, description="Radius multiplier on expand")
    min_radius: PositiveReal = Field(default=constants.TR_MIN_RADIUS, description="Run stalls below this radius")
    rho_regularization: float = Field(
        default=constants.RHO_REGULARIZATION,
        ge=0,
        description="Shift of ρ's numerator and denominator in units of max(1, |f|)·eps",
    )

    @model_validator(mode="after")
    def validate_radii(self) -> "TrustRegionOptions":
        """Ensure 0 < Δ₀ ≤ Δ_max and shrink threshold below expand threshold."""
        if self.delta0 > self.delta_max:
            msg = f"delta0 ({self.delta0}) must not exceed delta_max ({self.delta_max})"
            raise ValueError(msg)
        if self.rho_shrink >= self.rho_expand:
            msg = "rho_shrink must be smaller than rho_expand"
            raise ValueError(msg)
        return self


class TcgOptions(FrozenModel):
    """Truncated conjugate gradient parameters."""

    kappa: PositiveReal = Field(default=constants.TCG_KAPPA, description="Linear-convergence target κ")
    theta: PositiveReal = Field(default=constants.TCG_THETA, description="Superlinear exponent θ")
    max_inner: int | None = Field(default=None, ge=1, description="Inner iteration cap (None = 3·N·r)")
    min_inner: int = Field(default=1, ge=0, description="Inner iterations before the κ/θ rule applies")


class SolverOptions(FrozenModel):
    """Options shared by all fixed-rank solvers.

    JSON keys mirror field names; nested groups are objects, e.g.
    ``{"max_iters": 200, "tr": {"delta0": 0.5}}``.
    """

    max_iters: int = Field(default=constants.MAX_ITERS, ge=0, description="Outer iteration cap")
    grad_tol: PositiveReal = Field(default=constants.GRAD_TOL, description="Gradient metric-norm tolerance")
    cost_floor: float = Field(default=constants.COST_FLOOR, ge=0, description="Stop once f(Y) falls below this")
    beta_rule: BetaRule = Field(default=BetaRule.HESTENES_STIEFEL, description="RCG conjugate direction rule")
    max_step_halvings: int = Field(
        default=constants.MAX_STEP_HALVINGS,
        ge=0,
        description="Retraction failures tolerated per line search before stalling",
    )
    armijo: ArmijoOptions = Field(default_factory=ArmijoOptions)
    tr: TrustRegionOptions = Field(default_factory=TrustRegionOptions)
    tcg: TcgOptions = Field(default_factory=TcgOptions)
    altmin_inner_max_iters: int = Field(default=constants.ALTMIN_INNER_MAX_ITERS, ge=1)
    altmin_inner_tol_factor: PositiveReal = Field(default=constants.ALTMIN_INNER_TOL_FACTOR)

    @classmethod
    def from_file(cls, path: str | Path) -> "SolverOptions":
        """Load options from a JSON file.

        Raises:
            InputError: If the file is unreadable, not JSON or has invalid keys
        """
        p = Path(path)
        try:
            data = json.loads(p.read_text(encoding="utf-8"))
            return cls.model_validate(data)
        except OSError as e:
            msg = f"Cannot read options file ({e.strerror})"
            raise InputError(msg, path=str(p)) from e
        except json.JSONDecodeError as e:
            msg = f"Options file is not valid JSON (line {e.lineno})"
            raise InputError(msg, path=str(p)) from e
        except ValidationError as e:
            first = e.errors()[0]
            where = ".".join(str(part) for part in first["loc"])
            msg = f"Invalid solver option {where}: {first['msg']}"
            raise InputError(msg, path=str(p)) from e
