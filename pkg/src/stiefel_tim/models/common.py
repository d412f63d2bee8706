"""Common annotated types and validators."""

from typing import Annotated

from pydantic import AfterValidator, Field


def validate_probability(v: float) -> float:
    """Validate that a value lies in [0, 1].

    Args:
        v: Value to validate

    Returns:
        The validated value

    Raises:
        ValueError: If the value is outside [0, 1]
    """
    if not 0.0 <= v <= 1.0:
        msg = f"Invalid probability: {v}. Must lie in [0, 1]"
        raise ValueError(msg)
    return v


Probability = Annotated[float, AfterValidator(validate_probability), Field(description="Probability in [0, 1]")]

Count = Annotated[int, Field(ge=1, description="Positive count")]

PositiveReal = Annotated[float, Field(gt=0, description="Strictly positive real")]

UnitInterval = Annotated[float, Field(gt=0, lt=1, description="Real in the open interval (0, 1)")]
