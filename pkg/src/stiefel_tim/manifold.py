"""Quotient geometry of full-column-rank complex N×r matrices modulo the unitary group U(r).

Points are ``FactorPoint`` instances; tangent directions live in the horizontal
space {ξ : Yᴴξ Hermitian} and are carried as ``HorizontalVector`` instances.
"""

import hashlib
import logging
from typing import Any

import numpy as np
import numpy.typing as npt
from tenacity import RetryCallState, Retrying, retry_if_exception_type, stop_after_attempt

from .constants import FULL_RANK_RTOL, HORIZONTAL_RTOL, PAD_COLUMN_SCALE
from .exceptions import DimensionError, RankDeficiencyError, RetractionError
from .linalg import ComplexMatrix, as_complex, frobenius, hermitian_part, real_trace_metric, solve_skew_lyapunov
from .logging import log_event
from .rng import complex_gaussian, generator


MAX_REDRAWS = 5


class FactorPoint:
    """Full-column-rank complex N×r matrix Y, immutable.

    Attributes:
        matrix: Read-only view of Y
        gram: Read-only Hermitian Gram matrix YᴴY
        key: Digest of the entries, used as a cache key
    """

    __slots__ = ("_gram", "_key", "_matrix")

    def __init__(self, matrix: npt.ArrayLike, *, check: bool = True) -> None:
        """Wrap a matrix as a manifold point.

        Args:
            matrix: N×r complex matrix
            check: Validate full column rank

        Raises:
            DimensionError: If the matrix has more columns than rows
            RankDeficiencyError: If the smallest singular value is ≤ 1e-10 times the largest
        """
        y = np.array(as_complex(matrix, "Y"), copy=True)
        rows, cols = y.shape
        if cols < 1 or cols > rows:
            msg = "Factor must satisfy 1 ≤ r ≤ N"
            raise DimensionError(msg, expected="N×r with 1 ≤ r ≤ N", actual=y.shape)
        if check:
            sigma = np.linalg.svd(y, compute_uv=False)
            if sigma[0] <= 0 or sigma[-1] <= FULL_RANK_RTOL * sigma[0]:
                msg = f"Factor lost full column rank (singular values {sigma[-1]:.3e}..{sigma[0]:.3e})"
                raise RankDeficiencyError(msg)
        gram = hermitian_part(y.conj().T @ y)
        y.setflags(write=False)
        gram.setflags(write=False)
        self._matrix = y
        self._gram = gram
        self._key = hashlib.blake2b(y.tobytes() + repr(y.shape).encode(), digest_size=16).digest()

    @property
    def matrix(self) -> ComplexMatrix:
        return self._matrix

    @property
    def gram(self) -> ComplexMatrix:
        return self._gram

    @property
    def key(self) -> bytes:
        return self._key

    @property
    def shape(self) -> tuple[int, int]:
        rows, cols = self._matrix.shape
        return rows, cols

    @property
    def rank(self) -> int:
        return self._matrix.shape[1]

    def split(self, m: int) -> tuple[ComplexMatrix, ComplexMatrix]:
        """Split Y into L (top m rows) and R (bottom rows)."""
        return self._matrix[:m], self._matrix[m:]

    def __repr__(self) -> str:
        rows, cols = self.shape
        return f"FactorPoint(N={rows}, r={cols})"


class HorizontalVector:
    """Tangent direction ξ at a FactorPoint with Yᴴξ Hermitian.

    Supports ``+``, ``-``, scalar ``*`` and negation between vectors at the same anchor;
    ``inner`` and ``norm`` use the real-trace metric.
    """

    __slots__ = ("_matrix", "anchor")

    def __init__(self, matrix: npt.ArrayLike, anchor: FactorPoint) -> None:
        xi = np.asarray(matrix, dtype=np.complex128)
        if xi.shape != anchor.shape:
            msg = "Tangent vector shape must match its anchor"
            raise DimensionError(msg, expected=anchor.shape, actual=xi.shape)
        xi.setflags(write=False)
        self._matrix = xi
        self.anchor = anchor

    @property
    def matrix(self) -> ComplexMatrix:
        return self._matrix

    def _same_anchor(self, other: "HorizontalVector") -> None:
        if other.anchor is not self.anchor and other.anchor.key != self.anchor.key:
            msg = "Tangent vectors live at different points"
            raise DimensionError(msg)

    def inner(self, other: "HorizontalVector") -> float:
        """Real-trace metric with another vector at the same anchor."""
        self._same_anchor(other)
        return real_trace_metric(self._matrix, other._matrix)

    def norm(self) -> float:
        """Metric norm."""
        return frobenius(self._matrix)

    def __add__(self, other: "HorizontalVector") -> "HorizontalVector":
        self._same_anchor(other)
        return HorizontalVector(self._matrix + other._matrix, self.anchor)

    def __sub__(self, other: "HorizontalVector") -> "HorizontalVector":
        self._same_anchor(other)
        return HorizontalVector(self._matrix - other._matrix, self.anchor)

    def __mul__(self, scalar: float) -> "HorizontalVector":
        return HorizontalVector(float(scalar) * self._matrix, self.anchor)

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> "HorizontalVector":
        return HorizontalVector(self._matrix / float(scalar), self.anchor)

    def __neg__(self) -> "HorizontalVector":
        return HorizontalVector(-self._matrix, self.anchor)

    def __repr__(self) -> str:
        return f"HorizontalVector(norm={self.norm():.3e}, anchor={self.anchor!r})"


def horizontality_defect(Y: FactorPoint, v: npt.ArrayLike) -> float:
    """Return ‖Yᴴv − vᴴY‖_F, zero exactly on the horizontal space."""
    w = np.asarray(v)
    a = Y.matrix.conj().T @ w
    return frobenius(a - a.conj().T)


def is_horizontal(Y: FactorPoint, v: npt.ArrayLike, rtol: float = HORIZONTAL_RTOL) -> bool:
    """Check Yᴴv Hermitian up to ``rtol·‖v‖·‖Y‖``."""
    bound = rtol * frobenius(v) * frobenius(Y.matrix)
    return horizontality_defect(Y, v) <= bound


def zero_vector(Y: FactorPoint) -> HorizontalVector:
    """Zero tangent vector at Y."""
    return HorizontalVector(np.zeros(Y.shape, dtype=np.complex128), Y)


def project_horizontal(Y: FactorPoint, v: npt.ArrayLike) -> HorizontalVector:
    """Orthogonal projection onto the horizontal space at Y.

    Computes v − Y·Ω where Ω solves YᴴY·Ω + Ω·YᴴY = Yᴴv − vᴴY.

    Raises:
        DimensionError: If v does not have Y's shape
        RankDeficiencyError: If YᴴY is not positive definite
    """
    w = np.asarray(v, dtype=np.complex128)
    if w.shape != Y.shape:
        msg = "Direction shape must match the point"
        raise DimensionError(msg, expected=Y.shape, actual=w.shape)
    a = Y.matrix.conj().T @ w
    omega = solve_skew_lyapunov(Y.gram, a - a.conj().T)
    return HorizontalVector(w - Y.matrix @ omega, Y)


def retract(Y: FactorPoint, xi: HorizontalVector, step: float = 1.0) -> FactorPoint:
    """Move from Y along xi: R_Y(step·xi) = Y + step·xi.

    Raises:
        RetractionError: If the new point is not of full column rank
    """
    if step == 0:
        return Y
    try:
        return FactorPoint(Y.matrix + step * xi.matrix)
    except RankDeficiencyError as e:
        msg = f"Retraction with step {step:.3e} left the full-rank manifold"
        raise RetractionError(msg, step=step) from e


def transport(xi: HorizontalVector, to: FactorPoint) -> HorizontalVector:
    """Carry xi to the horizontal space at ``to`` (identity map, then re-projection)."""
    if to is xi.anchor:
        return xi
    return project_horizontal(to, xi.matrix)


def _log_redraw(retry_state: RetryCallState) -> None:
    if retry_state.outcome is not None and retry_state.outcome.failed:
        log_event(
            logging.WARNING,
            "Random point rank-deficient, re-drawing",
            "point_redrawn",
            attempt=retry_state.attempt_number,
        )


def random_point(N: int, r: int, seed: int) -> FactorPoint:
    """Draw a standard complex Gaussian N×r factor.

    The draw is deterministic per seed; a rank-deficient draw is replaced by the next
    draw from the same generator.

    Args:
        N: Number of rows
        r: Number of columns, 1 ≤ r ≤ N
        seed: Integer seed

    Returns:
        Full-column-rank point

    Raises:
        DimensionError: If r is outside 1..N
        RankDeficiencyError: If every re-draw failed the rank check
    """
    if r < 1 or r > N:
        msg = "Rank must satisfy 1 ≤ r ≤ N"
        raise DimensionError(msg, expected=f"1..{N}", actual=r)
    rng = generator(seed)
    for attempt in Retrying(
        stop=stop_after_attempt(MAX_REDRAWS),
        retry=retry_if_exception_type(RankDeficiencyError),
        before_sleep=_log_redraw,
        reraise=True,
    ):
        with attempt:
            return FactorPoint(complex_gaussian(rng, (N, r)))
    msg = "unreachable"  # pragma: no cover
    raise AssertionError(msg)  # pragma: no cover


def random_horizontal(Y: FactorPoint, seed: int) -> HorizontalVector:
    """Draw a unit-norm horizontal direction at Y."""
    rng = generator(seed)
    xi = project_horizontal(Y, complex_gaussian(rng, Y.shape))
    return xi / xi.norm()


def pad_point(Y: FactorPoint, seed: int, scale: float = PAD_COLUMN_SCALE) -> FactorPoint:
    """Append one small random column to Y, giving a full-rank point of rank r+1.

    Args:
        Y: Point of rank r < N
        seed: Seed for the new column
        scale: Column magnitude relative to ‖Y‖_F/√(N·r)

    Returns:
        Point of rank r+1 whose first r columns equal Y
    """
    rows, cols = Y.shape
    rng = generator(seed)
    unit = frobenius(Y.matrix) / np.sqrt(rows * cols)
    column: npt.NDArray[Any] = scale * unit * complex_gaussian(rng, (rows, 1))
    return FactorPoint(np.hstack([Y.matrix, column]))
