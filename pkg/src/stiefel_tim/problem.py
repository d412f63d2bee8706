"""Generalized low-rank problem built from a network instance.

X = [X^i_kj] = UᴴV is m×n with column block (transmitter j, message i) starting at
j·m + offset(i). Alignment is encoded as the affine system 𝒜(X) = b:

- for every receiver k, the desired blocks summed over connected transmitters holding
  message k form the d_k×d_k identity (one scalar constraint per entry);
- every interfering block X^i_kj with (k, j) ∈ ℰ, i ∈ S_j, i ≠ k vanishes.

The Burer–Monteiro cost is f(Y) = ½‖𝒜(LRᴴ) − b‖² for Y = [L; R] ∈ C^{(m+n)×r}.
"""

import threading
from typing import Final, NamedTuple

import numpy as np
import numpy.typing as npt
import scipy.sparse
from cachetools import LRUCache

from .constants import GRADIENT_HORIZONTAL_RTOL, GRADIENT_ROUNDING_SLACK
from .exceptions import DimensionError, InternalConsistencyError, MalformedInstanceError
from .linalg import ComplexMatrix, frobenius
from .manifold import FactorPoint, HorizontalVector, horizontality_defect, project_horizontal
from .models.network import NetworkInstance


IDENTITY_SUM: Final = 0
ZERO_BLOCK: Final = 1

_CACHE_SIZE = 16


class AffineSystem:
    """Sparse constraint operator 𝒜 with targets b.

    Constraint i reads ⟨A_i, X⟩ = Σ_{(row, col) ∈ support_i} X[row, col] = b_i; every
    A_i has entries in {0, 1}. The operator is stored as an l×(m·n) CSR matrix acting on
    the row-major flattening of X. The lifted view ℬ reads the same functionals off the
    upper-right m×n block of an N×N matrix Z.
    """

    __slots__ = ("_op", "_op_t", "b", "kinds", "m", "n", "supports")

    def __init__(
        self,
        m: int,
        n: int,
        supports: list[tuple[tuple[int, int], ...]],
        targets: list[float],
        kinds: list[int],
    ) -> None:
        self.m = m
        self.n = n
        self.supports = tuple(supports)
        rows: list[int] = []
        cols: list[int] = []
        for i, support in enumerate(supports):
            for row, col in support:
                rows.append(i)
                cols.append(row * n + col)
        data = np.ones(len(rows), dtype=np.float64)
        self._op = scipy.sparse.csr_matrix((data, (rows, cols)), shape=(len(supports), m * n))
        self._op_t = self._op.T.tocsr()
        b = np.asarray(targets, dtype=np.complex128)
        b.setflags(write=False)
        self.b = b
        kind_arr = np.asarray(kinds, dtype=np.int8)
        kind_arr.setflags(write=False)
        self.kinds = kind_arr

    @property
    def N(self) -> int:
        return self.m + self.n

    @property
    def l(self) -> int:  # noqa: E743
        """Number of scalar constraints."""
        return len(self.supports)

    @property
    def operator(self) -> scipy.sparse.csr_matrix:
        """l×(m·n) constraint matrix (read it, do not modify it)."""
        return self._op

    def apply(self, X: npt.ArrayLike) -> npt.NDArray[np.complex128]:
        """𝒜(X) without shape validation."""
        out: npt.NDArray[np.complex128] = self._op @ np.asarray(X).reshape(-1)
        return out

    def adjoint(self, c: npt.ArrayLike) -> ComplexMatrix:
        """𝒜*(c) = Σ_i c_i A_i as an m×n matrix."""
        out: ComplexMatrix = (self._op_t @ np.asarray(c)).reshape(self.m, self.n)
        return out

    def apply_lifted(self, Z: npt.ArrayLike) -> npt.NDArray[np.complex128]:
        """ℬ(Z) = 𝒜(Z₁₂) for an N×N matrix Z.

        Raises:
            DimensionError: If Z is not N×N
        """
        z = np.asarray(Z)
        if z.shape != (self.N, self.N):
            msg = "Lifted operand must be N×N"
            raise DimensionError(msg, expected=(self.N, self.N), actual=z.shape)
        return self.apply(z[: self.m, self.m :])

    def __repr__(self) -> str:
        return f"AffineSystem(m={self.m}, n={self.n}, l={self.l})"


def build_affine_system(inst: NetworkInstance) -> AffineSystem:
    """Encode the alignment conditions of an instance.

    Args:
        inst: Validated network instance

    Returns:
        Affine system with Σ_k d_k² identity-sum constraints followed by the zero-block
        constraints, duplicates removed

    Raises:
        MalformedInstanceError: If the instance has no users
    """
    if inst.K < 1:
        msg = "instance has no users"
        raise MalformedInstanceError(msg, field="K")

    ro = inst.row_offsets
    supports: list[tuple[tuple[int, int], ...]] = []
    targets: list[float] = []
    kinds: list[int] = []

    for k in range(inst.K):
        desired = inst.desired_transmitters(k)
        for a in range(inst.d[k]):
            for b in range(inst.d[k]):
                supports.append(tuple((ro[k] + a, inst.column_offset(j, k) + b) for j in desired))
                targets.append(1.0 if a == b else 0.0)
                kinds.append(IDENTITY_SUM)

    seen: set[tuple[int, int]] = set()
    for k in range(inst.K):
        for j in inst.connected_transmitters(k):
            for i in sorted(inst.sharing[j]):
                if i == k:
                    continue
                for a in range(inst.d[k]):
                    for b in range(inst.d[i]):
                        entry = (ro[k] + a, inst.column_offset(j, i) + b)
                        if entry in seen:
                            continue
                        seen.add(entry)
                        supports.append((entry,))
                        targets.append(0.0)
                        kinds.append(ZERO_BLOCK)

    return AffineSystem(inst.m, inst.n, supports, targets, kinds)


def _check_x(sys: AffineSystem, X: npt.ArrayLike) -> npt.NDArray[np.complex128]:
    x = np.asarray(X, dtype=np.complex128)
    if x.shape != (sys.m, sys.n):
        msg = "X must be m×n"
        raise DimensionError(msg, expected=(sys.m, sys.n), actual=x.shape)
    return x


def apply_affine(sys: AffineSystem, X: npt.ArrayLike) -> npt.NDArray[np.complex128]:
    """Evaluate 𝒜(X) = [⟨A_i, X⟩]_i.

    Raises:
        DimensionError: If X is not m×n
    """
    return sys.apply(_check_x(sys, X))


def residual(sys: AffineSystem, X: npt.ArrayLike) -> float:
    """Normalized residual m^{-1/2}·‖𝒜(X) − b‖₂.

    Raises:
        DimensionError: If X is not m×n
    """
    return frobenius(apply_affine(sys, X) - sys.b) / float(np.sqrt(sys.m))


class _Evaluation(NamedTuple):
    residual: npt.NDArray[np.complex128]  # C = 𝒜(LRᴴ) − b
    adjoint: ComplexMatrix  # G = 𝒜*(C)


class ProblemHandle:
    """Fixed-rank least-squares problem min f(Y) over N×r factors.

    (C, G) per point is memoized in a small LRU cache keyed by the point digest, so
    cost, gradient and Hessian at the same point share one operator evaluation. The
    cache is guarded by a lock; a handle may be shared between threads.
    """

    def __init__(self, system: AffineSystem, rank: int) -> None:
        """Create a handle.

        Args:
            system: Affine system
            rank: Factor width r

        Raises:
            DimensionError: If r is outside 1..N
        """
        if rank < 1 or rank > system.N:
            msg = "Rank must satisfy 1 ≤ r ≤ N"
            raise DimensionError(msg, expected=f"1..{system.N}", actual=rank)
        self.system = system
        self.rank = rank
        self._cache: LRUCache[bytes, _Evaluation] = LRUCache(maxsize=_CACHE_SIZE)
        self._lock = threading.Lock()

    @property
    def N(self) -> int:
        return self.system.N

    def clear_cache(self) -> None:
        """Drop memoized evaluations."""
        with self._lock:
            self._cache.clear()

    def _check_point(self, Y: FactorPoint) -> None:
        if Y.shape != (self.system.N, self.rank):
            msg = "Point does not match the problem dimensions"
            raise DimensionError(msg, expected=(self.system.N, self.rank), actual=Y.shape)

    def _evaluate(self, Y: FactorPoint) -> _Evaluation:
        with self._lock:
            hit = self._cache.get(Y.key)
        if hit is not None:
            return hit
        self._check_point(Y)
        L, R = Y.split(self.system.m)
        c = self.system.apply(L @ R.conj().T) - self.system.b
        ev = _Evaluation(residual=c, adjoint=self.system.adjoint(c))
        with self._lock:
            self._cache[Y.key] = ev
        return ev

    def recover(self, Y: FactorPoint) -> ComplexMatrix:
        """X = L·Rᴴ."""
        self._check_point(Y)
        L, R = Y.split(self.system.m)
        out: ComplexMatrix = L @ R.conj().T
        return out

    def cost(self, Y: FactorPoint) -> float:
        """f(Y) = ½ Σ_i |⟨A_i, LRᴴ⟩ − b_i|².

        Raises:
            DimensionError: If Y is not N×r
        """
        c = self._evaluate(Y).residual
        return 0.5 * float(np.vdot(c, c).real)

    def residual(self, Y: FactorPoint) -> float:
        """m^{-1/2}·‖𝒜(LRᴴ) − b‖ at Y."""
        return frobenius(self._evaluate(Y).residual) / float(np.sqrt(self.system.m))

    def euclidean_gradient(self, Y: FactorPoint) -> ComplexMatrix:
        """Σ_i (C_i B_i + C_i* B_iᴴ)·Y = [G·R; Gᴴ·L] with G = 𝒜*(C).

        Raises:
            DimensionError: If Y is not N×r
        """
        G = self._evaluate(Y).adjoint
        L, R = Y.split(self.system.m)
        return np.vstack([G @ R, G.conj().T @ L])

    def riemannian_gradient(self, Y: FactorPoint) -> HorizontalVector:
        """Euclidean gradient, which is already horizontal.

        The horizontality bound is relative to the larger of ‖g‖·‖Y‖ and the rounding
        level of Yᴴg, which stays at eps·‖G‖·‖Y‖² as g vanishes near a stationary point
        with non-zero residual.

        Raises:
            InternalConsistencyError: If Yᴴ·grad is not Hermitian within that bound
        """
        g = self.euclidean_gradient(Y)
        y_norm = frobenius(Y.matrix)
        rounding = GRADIENT_ROUNDING_SLACK * float(np.finfo(np.float64).eps) * frobenius(self._evaluate(Y).adjoint)
        bound = max(GRADIENT_HORIZONTAL_RTOL * frobenius(g) * y_norm, rounding * y_norm**2)
        defect = horizontality_defect(Y, g)
        if defect > bound and defect > 0:
            msg = f"Gradient is not horizontal (defect {defect:.3e}, bound {bound:.3e})"
            raise InternalConsistencyError(msg)
        return HorizontalVector(g, Y)

    def riemannian_hessian(self, Y: FactorPoint, eta: HorizontalVector) -> HorizontalVector:
        """Π_h([G_η R + G η_R; G_ηᴴ L + Gᴴ η_L]) with G_η = 𝒜*(𝒜(η_L Rᴴ + L η_Rᴴ)).

        Raises:
            DimensionError: If eta is not anchored at Y
        """
        if eta.anchor is not Y and eta.anchor.key != Y.key:
            msg = "Hessian direction is anchored at another point"
            raise DimensionError(msg)
        m = self.system.m
        G = self._evaluate(Y).adjoint
        L, R = Y.split(m)
        eta_L, eta_R = eta.matrix[:m], eta.matrix[m:]
        c_eta = self.system.apply(eta_L @ R.conj().T + L @ eta_R.conj().T)
        G_eta = self.system.adjoint(c_eta)
        top = G_eta @ R + G @ eta_R
        bottom = G_eta.conj().T @ L + G.conj().T @ eta_L
        return project_horizontal(Y, np.vstack([top, bottom]))


def make_problem(inst: NetworkInstance, rank: int) -> ProblemHandle:
    """Build the affine system of an instance and wrap it at a fixed rank."""
    return ProblemHandle(build_affine_system(inst), rank)
