"""Riemannian conjugate gradient with Armijo backtracking."""

from functools import partial

from stiefel_tim.constants import BETA_BREAKDOWN
from stiefel_tim.enums import BetaRule, SolverName, SolverStatus
from stiefel_tim.manifold import FactorPoint, HorizontalVector, retract, transport
from stiefel_tim.models.options import SolverOptions
from stiefel_tim.models.report import SolverReport
from stiefel_tim.problem import ProblemHandle

from .base import IterateCallback, TraceRecorder, armijo_backtracking, initial_status, log_start


def hestenes_stiefel_beta(
    grad: HorizontalVector,
    prev_grad: HorizontalVector,
    prev_direction: HorizontalVector,
    breakdown: float,
) -> float:
    """Hestenes–Stiefel β = g(grad, y) / g(𝔗η_prev, y), y = grad − 𝔗g_prev, inputs already transported.

    Returns 0 when the denominator magnitude is below ``breakdown``.
    """
    y = grad - prev_grad
    denom = prev_direction.inner(y)
    if abs(denom) < breakdown:
        return 0.0
    return grad.inner(y) / denom


def rcg_solve(
    p: ProblemHandle,
    Y0: FactorPoint,
    opts: SolverOptions | None = None,
    callback: IterateCallback | None = None,
) -> tuple[FactorPoint, SolverReport]:
    """Minimize f over the quotient manifold with nonlinear conjugate gradient.

    Directions follow η_{k+1} = −grad f_{k+1} + β_k·𝔗(η_k) with the Hestenes–Stiefel β
    (or β = 0 under ``BetaRule.STEEPEST``). The direction falls back to −grad when β
    breaks down or the new direction is not a descent direction.

    Args:
        p: Fixed-rank problem
        Y0: Full-rank starting point
        opts: Solver options
        callback: Called with (iteration, point, cost) after each iteration

    Returns:
        Final point and report
    """
    opts = opts or SolverOptions()
    trace = TraceRecorder(SolverName.RCG, p.rank)

    Y = Y0
    f = p.cost(Y)
    grad = p.riemannian_gradient(Y)
    gn = grad.norm()
    log_start(SolverName.RCG, p.rank, f, gn)
    trace.record(f, gn, 0.0)
    if callback is not None:
        callback(0, Y, f)

    status = initial_status(f, gn, opts)
    direction = -grad
    while status is None:
        if trace.iterations >= opts.max_iters:
            status = SolverStatus.MAX_ITERS
            break

        slope = grad.inner(direction)
        if slope >= 0:
            direction = -grad
            slope = -gn * gn

        outcome = armijo_backtracking(f, slope, partial(_trial, p, Y, direction), opts)
        if outcome is None:
            status = SolverStatus.STALLED
            break

        Y_new, f_new = outcome.point, outcome.cost
        grad_new = p.riemannian_gradient(Y_new)
        if opts.beta_rule is BetaRule.STEEPEST:
            beta = 0.0
            moved_direction = None
        else:
            moved_grad = transport(grad, Y_new)
            moved_direction = transport(direction, Y_new)
            beta = hestenes_stiefel_beta(grad_new, moved_grad, moved_direction, BETA_BREAKDOWN)

        direction = -grad_new if moved_direction is None or beta == 0.0 else -grad_new + beta * moved_direction
        if direction.inner(-grad_new) <= 0:
            direction = -grad_new

        Y, f, grad = Y_new, f_new, grad_new
        gn = grad.norm()
        trace.record(f, gn, outcome.step)
        if callback is not None:
            callback(trace.iterations, Y, f)

        if f < opts.cost_floor:
            status = SolverStatus.CONVERGED_COST
        elif gn < opts.grad_tol:
            status = SolverStatus.CONVERGED_GRADIENT

    return Y, trace.finish(status)


def _trial(p: ProblemHandle, Y: FactorPoint, eta: HorizontalVector, step: float) -> tuple[FactorPoint, float]:
    Y_new = retract(Y, eta, step)
    return Y_new, p.cost(Y_new)
