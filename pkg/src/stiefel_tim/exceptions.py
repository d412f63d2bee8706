"""Custom exceptions for stiefel-tim."""

from typing import Any


class StiefelTimError(Exception):
    """Base exception for all stiefel-tim errors."""


class ConfigurationError(StiefelTimError):
    """Raised when configuration is invalid or missing."""


class InputError(StiefelTimError):
    """Raised when a user-supplied file cannot be used.

    Attributes:
        path: Offending file path, if the input came from a file
    """

    def __init__(self, message: str, path: str | None = None) -> None:
        """Initialize input error.

        Args:
            message: Error message
            path: Path of the offending file
        """
        super().__init__(message)
        self.path = path

    def __str__(self) -> str:
        """Format error with the offending path."""
        base = super().__str__()
        if self.path is not None:
            return f"{base}: {self.path}"
        return base


class MalformedInstanceError(InputError):
    """Raised when a network instance violates its invariants.

    Attributes:
        field: Name of the offending field (``K``, ``d``, ``edges`` or ``sharing``)
    """

    def __init__(self, message: str, field: str | None = None, path: str | None = None) -> None:
        """Initialize malformed instance error.

        Args:
            message: Error message
            field: Offending field name
            path: Path of the offending file
        """
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message, path=path)
        self.field = field


class DimensionError(StiefelTimError):
    """Raised when operand shapes do not match.

    Attributes:
        expected: Expected shape
        actual: Shape that was received
    """

    def __init__(self, message: str, expected: Any = None, actual: Any = None) -> None:  # noqa: ANN401
        """Initialize dimension error.

        Args:
            message: Error message
            expected: Expected shape
            actual: Received shape
        """
        super().__init__(message)
        self.expected = expected
        self.actual = actual

    def __str__(self) -> str:
        """Format error with expected and actual shapes."""
        parts = [super().__str__()]
        if self.expected is not None:
            parts.append(f"expected={self.expected}")
        if self.actual is not None:
            parts.append(f"actual={self.actual}")
        return " ".join(parts)


class NonFiniteError(StiefelTimError):
    """Raised when a matrix contains NaN or infinite entries."""


class RankDeficiencyError(StiefelTimError):
    """Raised when a factor loses full column rank or a Gram matrix is not positive definite."""


class RetractionError(RankDeficiencyError):
    """Raised when a retraction step leaves the full-rank manifold.

    Attributes:
        step: Step length that produced the rank-deficient point
    """

    def __init__(self, message: str, step: float | None = None) -> None:
        """Initialize retraction error.

        Args:
            message: Error message
            step: Offending step length
        """
        super().__init__(message)
        self.step = step


class UnsupportedCaseError(StiefelTimError):
    """Raised for inputs outside an operation's supported scope (e.g. multiple streams)."""


class InternalConsistencyError(StiefelTimError):
    """Raised when a numerical identity that must hold is violated."""


class RankSearchExhaustedError(StiefelTimError):
    """Raised when no rank up to the cap met the acceptance criterion.

    Attributes:
        per_rank: Summaries of every attempted rank
    """

    def __init__(self, message: str, per_rank: list[Any] | None = None) -> None:
        """Initialize exhausted search error.

        Args:
            message: Error message
            per_rank: Per-rank attempt summaries
        """
        super().__init__(message)
        self.per_rank = per_rank or []
