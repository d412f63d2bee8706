"""Channel realizations."""

import numpy as np
from pydantic import Field, model_validator

from stiefel_tim.enums import ChannelModel

from .base import ArrayModel, ComplexArray, RealArray


class ChannelRealization(ArrayModel):
    """Channel coefficients h_kj on the edge set, zero elsewhere.

    ``gains[k, j]`` is the coefficient from transmitter j to receiver k.
    """

    channel_model: ChannelModel
    gains: ComplexArray
    noise_power: float = Field(gt=0, description="Noise variance σ²")
    distances_km: RealArray | None = Field(default=None, description="Link distances (pathloss only)")

    @model_validator(mode="after")
    def validate_gains(self) -> "ChannelRealization":
        """Ensure a finite square gain matrix."""
        if self.gains.ndim != 2 or self.gains.shape[0] != self.gains.shape[1]:  # noqa: PLR2004
            msg = f"gains must be a square matrix, got shape {self.gains.shape}"
            raise ValueError(msg)
        if not np.all(np.isfinite(self.gains)):
            msg = "gains have non-finite entries"
            raise ValueError(msg)
        return self

    def h(self, k: int, j: int) -> complex:
        """Coefficient from transmitter j to receiver k."""
        return complex(self.gains[k, j])
