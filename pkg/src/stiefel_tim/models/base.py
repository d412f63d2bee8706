"""Base classes for stiefel-tim data models."""

from typing import TYPE_CHECKING

import numpy as np
from pydantic import BaseModel, ConfigDict


if TYPE_CHECKING:
    import numpy.typing as npt

    ComplexArray = npt.NDArray[np.complex128]
    RealArray = npt.NDArray[np.float64]
else:
    # pydantic validates arbitrary types with isinstance, which needs the bare class
    ComplexArray = np.ndarray
    RealArray = np.ndarray


class FrozenModel(BaseModel):
    """Immutable model that rejects unknown fields.

    Used for inputs (instances, options, sweep configs) so that a typo in a JSON file
    is reported instead of silently ignored.
    """

    model_config = ConfigDict(
        extra="forbid",
        frozen=True,
    )


class ArrayModel(BaseModel):
    """Result model that carries numpy arrays next to plain fields."""

    model_config = ConfigDict(
        arbitrary_types_allowed=True,
    )
