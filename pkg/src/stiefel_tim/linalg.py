"""Dense complex matrix kernels used by the manifold and the solvers."""

from typing import Any, NamedTuple

import numpy as np
import numpy.typing as npt
import scipy.linalg

from .constants import GRAM_PD_RTOL, NUMERIC_RANK_RTOL
from .exceptions import DimensionError, NonFiniteError, RankDeficiencyError


ComplexMatrix = npt.NDArray[np.complex128]
RealVector = npt.NDArray[np.float64]


class SVDResult(NamedTuple):
    """Thin SVD ``A = U·diag(sigma)·Vᴴ`` with sigma sorted descending."""

    U: ComplexMatrix
    sigma: RealVector
    V: ComplexMatrix


def as_complex(a: npt.ArrayLike, name: str = "matrix") -> ComplexMatrix:
    """Convert to a finite 2-D complex array.

    Args:
        a: Array-like input
        name: Operand name used in error messages

    Returns:
        complex128 array

    Raises:
        DimensionError: If the input is not 2-D
        NonFiniteError: If any entry is NaN or infinite
    """
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim != 2:  # noqa: PLR2004
        msg = f"{name} must be a matrix"
        raise DimensionError(msg, expected="2-D", actual=arr.shape)
    if not np.all(np.isfinite(arr)):
        msg = f"{name} has non-finite entries"
        raise NonFiniteError(msg)
    return arr


def _check_same_shape(a: npt.NDArray[Any], b: npt.NDArray[Any]) -> None:
    if a.shape != b.shape:
        msg = "Operands must have the same shape"
        raise DimensionError(msg, expected=a.shape, actual=b.shape)


def herm_inner(A: npt.ArrayLike, B: npt.ArrayLike) -> complex:
    """Hermitian inner product Tr(Aᴴ B), conjugate-linear in A.

    Raises:
        DimensionError: If shapes differ
    """
    a = np.asarray(A)
    b = np.asarray(B)
    _check_same_shape(a, b)
    return complex(np.vdot(a, b))


def real_trace_metric(xi: npt.ArrayLike, zeta: npt.ArrayLike) -> float:
    """Riemannian metric Re Tr(xiᴴ zeta) = ½ Tr(xiᴴ zeta + zetaᴴ xi).

    Raises:
        DimensionError: If shapes differ
    """
    a = np.asarray(xi)
    b = np.asarray(zeta)
    _check_same_shape(a, b)
    return float(np.vdot(a, b).real)


def frobenius(a: npt.ArrayLike) -> float:
    """Frobenius norm."""
    return float(np.linalg.norm(np.asarray(a)))


def hermitian_part(a: ComplexMatrix) -> ComplexMatrix:
    """Return (A + Aᴴ)/2."""
    return 0.5 * (a + a.conj().T)


def skew_part(a: ComplexMatrix) -> ComplexMatrix:
    """Return (A − Aᴴ)/2."""
    return 0.5 * (a - a.conj().T)


def solve_skew_lyapunov(G: npt.ArrayLike, S: npt.ArrayLike) -> ComplexMatrix:
    """Solve G·Ω + Ω·G = S for Hermitian positive-definite G and skew-Hermitian S.

    G = QΛQᴴ is eigendecomposed and Ω = Q·M·Qᴴ with M_ij = (QᴴSQ)_ij / (λ_i + λ_j).
    The returned Ω is skew-Hermitian.

    Args:
        G: r×r Hermitian positive-definite matrix (typically YᴴY)
        S: r×r skew-Hermitian right-hand side

    Returns:
        Skew-Hermitian solution Ω

    Raises:
        DimensionError: If G is not square or S does not match G
        RankDeficiencyError: If G is not positive definite
    """
    g = as_complex(G, "G")
    s = as_complex(S, "S")
    if g.shape[0] != g.shape[1]:
        msg = "G must be square"
        raise DimensionError(msg, expected="r×r", actual=g.shape)
    _check_same_shape(g, s)

    lam, Q = scipy.linalg.eigh(g, check_finite=False)
    lam_max = float(lam[-1]) if lam.size else 0.0
    if lam.size and (lam_max <= 0 or float(lam[0]) <= GRAM_PD_RTOL * lam_max):
        msg = f"Gram matrix is not positive definite (eigenvalues {lam[0]:.3e}..{lam_max:.3e})"
        raise RankDeficiencyError(msg)

    M = (Q.conj().T @ s @ Q) / (lam[:, None] + lam[None, :])
    omega: ComplexMatrix = Q @ M @ Q.conj().T
    return skew_part(omega)


def svd(A: npt.ArrayLike) -> SVDResult:
    """Thin singular value decomposition.

    Raises:
        NonFiniteError: If A has non-finite entries
    """
    a = as_complex(A, "A")
    U, sigma, Vh = scipy.linalg.svd(a, full_matrices=False, check_finite=False, lapack_driver="gesdd")
    return SVDResult(U=U, sigma=sigma.astype(np.float64), V=Vh.conj().T)


def numeric_rank(sigma: npt.ArrayLike, tol_rel: float = NUMERIC_RANK_RTOL) -> int:
    """Count singular values above ``tol_rel`` times the largest one.

    Args:
        sigma: Singular values sorted descending
        tol_rel: Relative threshold

    Returns:
        Numeric rank (0 for an all-zero spectrum)
    """
    s = np.asarray(sigma, dtype=np.float64)
    if s.size == 0 or s[0] <= 0:
        return 0
    return int(np.count_nonzero(s > tol_rel * s[0]))
