"""Alternating minimization baseline.

Freezes R and takes gradient steps on L, then freezes L and steps on R. Each half
solves a convex least-squares subproblem with plain gradient descent and Armijo
backtracking.
"""

import numpy as np

from stiefel_tim.enums import SolverName, SolverStatus
from stiefel_tim.linalg import ComplexMatrix
from stiefel_tim.manifold import FactorPoint, random_point
from stiefel_tim.models.options import SolverOptions
from stiefel_tim.models.report import SolverReport
from stiefel_tim.problem import AffineSystem, ProblemHandle

from .base import IterateCallback, TraceRecorder, armijo_backtracking, initial_status, log_start


class _Factors:
    """Mutable (L, R) pair with cost/gradient evaluation."""

    def __init__(self, system: AffineSystem, L: ComplexMatrix, R: ComplexMatrix) -> None:
        self.system = system
        self.L = L
        self.R = R

    def cost_of(self, L: ComplexMatrix, R: ComplexMatrix) -> float:
        c = self.system.apply(L @ R.conj().T) - self.system.b
        return 0.5 * float(np.vdot(c, c).real)

    def adjoint(self) -> ComplexMatrix:
        c = self.system.apply(self.L @ self.R.conj().T) - self.system.b
        return self.system.adjoint(c)

    def grad_norm(self) -> float:
        G = self.adjoint()
        gl = G @ self.R
        gr = G.conj().T @ self.L
        return float(np.sqrt(np.vdot(gl, gl).real + np.vdot(gr, gr).real))

    def point(self) -> FactorPoint:
        return FactorPoint(np.vstack([self.L, self.R]), check=False)


def _descend_half(
    factors: _Factors,
    f: float,
    which: str,
    opts: SolverOptions,
    inner_tol: float,
    step0: float,
) -> tuple[float, float, int]:
    """Gradient descent on one block; returns (cost, last accepted step, accepted steps)."""
    step = step0
    accepted = 0
    for _ in range(opts.altmin_inner_max_iters):
        G = factors.adjoint()
        if which == "L":
            grad = G @ factors.R
            block = factors.L
        else:
            grad = G.conj().T @ factors.L
            block = factors.R
        g2 = float(np.vdot(grad, grad).real)
        if np.sqrt(g2) < inner_tol:
            break

        def trial(t: float, block: ComplexMatrix = block, grad: ComplexMatrix = grad) -> tuple[ComplexMatrix, float]:
            moved = block - t * grad
            if which == "L":
                return moved, factors.cost_of(moved, factors.R)
            return moved, factors.cost_of(factors.L, moved)

        outcome = armijo_backtracking(f, -g2, trial, opts, initial_step=2.0 * step)
        if outcome is None:
            break
        if which == "L":
            factors.L = outcome.point
        else:
            factors.R = outcome.point
        f, step = outcome.cost, outcome.step
        accepted += 1
    return f, step, accepted


def altmin_factors(
    p: ProblemHandle,
    Y0: FactorPoint,
    opts: SolverOptions | None = None,
    callback: IterateCallback | None = None,
) -> tuple[FactorPoint, SolverReport]:
    """Run alternating minimization from the factor Y0 = [L; R].

    The returned point is built without a rank check; AltMin iterates are not
    confined to full-rank factors.

    Args:
        p: Fixed-rank problem (only its affine system and rank are used)
        Y0: Starting factor
        opts: Solver options
        callback: Called with (iteration, point, cost) after each outer iteration

    Returns:
        Final factor and report
    """
    opts = opts or SolverOptions()
    system = p.system
    L0, R0 = Y0.split(system.m)
    factors = _Factors(system, np.array(L0), np.array(R0))
    trace = TraceRecorder(SolverName.ALTMIN, p.rank)
    inner_tol = opts.altmin_inner_tol_factor * opts.grad_tol

    f = factors.cost_of(factors.L, factors.R)
    gn = factors.grad_norm()
    log_start(SolverName.ALTMIN, p.rank, f, gn)
    trace.record(f, gn, 0.0)
    if callback is not None:
        callback(0, factors.point(), f)

    status = initial_status(f, gn, opts)
    step = opts.armijo.initial_step / 2.0
    while status is None:
        if trace.iterations >= opts.max_iters:
            status = SolverStatus.MAX_ITERS
            break

        f, step_l, moved_l = _descend_half(factors, f, "L", opts, inner_tol, step)
        f, step_r, moved_r = _descend_half(factors, f, "R", opts, inner_tol, step_l)
        step = step_r
        gn = factors.grad_norm()
        trace.record(f, gn, step)
        if callback is not None:
            callback(trace.iterations, factors.point(), f)

        if f < opts.cost_floor:
            status = SolverStatus.CONVERGED_COST
        elif gn < opts.grad_tol:
            status = SolverStatus.CONVERGED_GRADIENT
        elif moved_l == 0 and moved_r == 0:
            status = SolverStatus.STALLED

    return factors.point(), trace.finish(status)


def altmin_solve(
    sys: AffineSystem,
    r: int,
    seed: int,
    opts: SolverOptions | None = None,
    callback: IterateCallback | None = None,
) -> tuple[ComplexMatrix, SolverReport]:
    """Alternating minimization from a seeded random factor.

    Args:
        sys: Affine system
        r: Factor width, r ≥ 1
        seed: Seed for the starting factor (same draw as ``random_point(N, r, seed)``)
        opts: Solver options
        callback: Iterate callback

    Returns:
        X = L·Rᴴ and the report
    """
    problem = ProblemHandle(sys, r)
    Y, report = altmin_factors(problem, random_point(sys.N, r, seed), opts, callback)
    L, R = Y.split(sys.m)
    X: ComplexMatrix = L @ R.conj().T
    return X, report
