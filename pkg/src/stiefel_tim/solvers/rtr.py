"""Riemannian trust-region method with a truncated conjugate gradient inner solver."""

import logging
import math
from typing import NamedTuple, Protocol

import numpy as np

from stiefel_tim.enums import SolverName, SolverStatus, TcgStop
from stiefel_tim.exceptions import RetractionError
from stiefel_tim.logging import log_event
from stiefel_tim.manifold import FactorPoint, HorizontalVector, retract, zero_vector
from stiefel_tim.models.options import SolverOptions
from stiefel_tim.models.report import SolverReport
from stiefel_tim.problem import ProblemHandle

from .base import IterateCallback, TraceRecorder, initial_status, log_start


BOUNDARY_STOPS = frozenset({TcgStop.NEGATIVE_CURVATURE, TcgStop.EXCEEDED_TRUST_REGION})


class HessianOperator(Protocol):
    """Anything that applies a Riemannian Hessian at a point."""

    def riemannian_hessian(self, Y: FactorPoint, eta: HorizontalVector) -> HorizontalVector: ...


class TcgResult(NamedTuple):
    """Approximate trust-region step.

    Attributes:
        eta: Step, ‖eta‖ ≤ Δ
        Heta: Hessian applied to eta
        stop: Why the inner loop ended
        iterations: Inner iterations performed
    """

    eta: HorizontalVector
    Heta: HorizontalVector
    stop: TcgStop
    iterations: int


def model_value(grad: HorizontalVector, eta: HorizontalVector, Heta: HorizontalVector) -> float:
    """Quadratic model change m(η) − m(0) = g(grad, η) + ½ g(η, Hη)."""
    return grad.inner(eta) + 0.5 * eta.inner(Heta)


def _boundary_roots(e_e: float, e_d: float, d_d: float, delta: float) -> tuple[float, float]:
    """Both roots τ of ‖η + τδ‖² = Δ² (negative root first)."""
    disc = math.sqrt(max(e_d * e_d + d_d * (delta * delta - e_e), 0.0))
    return (-e_d - disc) / d_d, (-e_d + disc) / d_d


def _cauchy_point(
    grad: HorizontalVector,
    H_grad: HorizontalVector,
    delta: float,
) -> tuple[HorizontalVector, HorizontalVector]:
    """Minimizer of the model along −grad inside the trust region."""
    gn = grad.norm()
    g_hg = grad.inner(H_grad)
    tau = 1.0 if g_hg <= 0 else min(gn**3 / (delta * g_hg), 1.0)
    scale = -tau * delta / gn
    return grad * scale, H_grad * scale


def truncated_cg(
    p: HessianOperator,
    Y: FactorPoint,
    grad: HorizontalVector,
    delta: float,
    opts: SolverOptions | None = None,
) -> TcgResult:
    """Approximately minimize m(η) = f + g(grad, η) + ½ g(η, Hess[η]) subject to ‖η‖ ≤ Δ.

    Steihaug–Toint CG starting from η = 0. Stops on negative curvature or when a step
    would leave the trust region (both return a boundary point), when
    ‖r_j‖ ≤ ‖r₀‖·min(‖r₀‖^θ, κ), or at the inner iteration cap. At negative curvature
    both boundary roots are compared and the one with the smaller model value is kept.
    If rounding ever leaves m(η) > m(0), the Cauchy point is returned instead.

    Args:
        p: Object providing ``riemannian_hessian``
        Y: Current point
        grad: Riemannian gradient at Y
        delta: Trust-region radius, Δ > 0
        opts: Solver options (``tcg`` group)

    Returns:
        The step with its Hessian image, stop reason and inner iteration count

    Raises:
        ValueError: If delta is not positive
    """
    if delta <= 0:
        msg = f"Trust-region radius must be positive, got {delta}"
        raise ValueError(msg)
    opts = opts or SolverOptions()
    kappa, theta = opts.tcg.kappa, opts.tcg.theta
    rows, cols = Y.shape
    max_inner = opts.tcg.max_inner or 3 * rows * cols

    eta = zero_vector(Y)
    Heta = zero_vector(Y)
    r = grad
    r_r = r.inner(r)
    norm_r0 = math.sqrt(r_r)
    if norm_r0 == 0:
        return TcgResult(eta, Heta, TcgStop.ZERO_GRADIENT, 0)

    delta_dir = -r
    e_e = 0.0
    e_d = 0.0
    d_d = r_r
    model = 0.0
    H_first: HorizontalVector | None = None
    stop = TcgStop.MAX_INNER_ITERATIONS
    j = 0

    for j in range(1, max_inner + 1):
        H_delta = p.riemannian_hessian(Y, delta_dir)
        if H_first is None:
            H_first = H_delta
        d_hd = delta_dir.inner(H_delta)
        finite = math.isfinite(d_hd)
        alpha = r_r / d_hd if finite and d_hd != 0 else math.inf
        e_e_new = e_e + 2 * alpha * e_d + alpha * alpha * d_d if math.isfinite(alpha) else math.inf

        if not finite or d_hd <= 0 or e_e_new >= delta * delta:
            tau_minus, tau_plus = _boundary_roots(e_e, e_d, d_d, delta)
            if finite:
                candidates = [tau_plus] if d_hd > 0 else [tau_minus, tau_plus]
                values = [model_value(grad, eta + delta_dir * tau, Heta + H_delta * tau) for tau in candidates]
                best = candidates[int(np.argmin(values))]
                eta, Heta = eta + delta_dir * best, Heta + H_delta * best
            else:
                eta = eta + delta_dir * tau_plus
                Heta = p.riemannian_hessian(Y, eta)
            stop = TcgStop.EXCEEDED_TRUST_REGION if finite and d_hd > 0 else TcgStop.NEGATIVE_CURVATURE
            break

        new_eta = eta + delta_dir * alpha
        new_Heta = Heta + H_delta * alpha
        new_model = model_value(grad, new_eta, new_Heta)
        if new_model >= model:
            stop = TcgStop.MODEL_INCREASED
            break
        eta, Heta, model, e_e = new_eta, new_Heta, new_model, e_e_new

        r = r + H_delta * alpha
        r_r_old = r_r
        r_r = r.inner(r)
        norm_r = math.sqrt(r_r)
        if j >= opts.tcg.min_inner and norm_r <= norm_r0 * min(norm_r0**theta, kappa):
            stop = (
                TcgStop.REACHED_TARGET_LINEAR if kappa < norm_r0**theta else TcgStop.REACHED_TARGET_SUPERLINEAR
            )
            break

        beta = r_r / r_r_old
        delta_dir = -r + delta_dir * beta
        e_d = beta * (e_d + alpha * d_d)
        d_d = r_r + beta * beta * d_d

    if H_first is not None and model_value(grad, eta, Heta) > 0:
        # first search direction is −grad, so H_first = Hess[−grad]
        eta, Heta = _cauchy_point(grad, -H_first, delta)

    if eta.norm() > delta:
        shrink = delta / eta.norm()
        eta, Heta = eta * shrink, Heta * shrink
    return TcgResult(eta, Heta, stop, j)


def rtr_solve(
    p: ProblemHandle,
    Y0: FactorPoint,
    opts: SolverOptions | None = None,
    callback: IterateCallback | None = None,
) -> tuple[FactorPoint, SolverReport]:
    """Minimize f with the Riemannian trust-region method.

    Each outer step solves the trust-region subproblem with ``truncated_cg`` and
    evaluates ρ = (f(Y) − f(R(η)) + ε_ρ) / (m(0) − m(η) + ε_ρ), with ε_ρ =
    max(1, |f|)·eps·ρ_reg. The step is accepted iff the model decreased, ρ > ρ_accept
    and f(R(η)) ≤ f(Y). The radius shrinks when ρ < ρ_shrink and expands when
    ρ > ρ_expand with the step on the boundary. A radius below ``tr.min_radius``
    ends the run as stalled.

    Args:
        p: Fixed-rank problem
        Y0: Full-rank starting point
        opts: Solver options
        callback: Called with (iteration, point, cost) after each iteration

    Returns:
        Final point and report
    """
    opts = opts or SolverOptions()
    tr = opts.tr
    trace = TraceRecorder(SolverName.RTR, p.rank)

    Y = Y0
    f = p.cost(Y)
    grad = p.riemannian_gradient(Y)
    gn = grad.norm()
    delta = tr.delta0
    log_start(SolverName.RTR, p.rank, f, gn)
    trace.record(f, gn, delta)
    if callback is not None:
        callback(0, Y, f)

    status = initial_status(f, gn, opts)
    while status is None:
        if trace.iterations >= opts.max_iters:
            status = SolverStatus.MAX_ITERS
            break

        step = truncated_cg(p, Y, grad, delta, opts)
        eta = step.eta
        model_decrease = -model_value(grad, eta, step.Heta)

        try:
            Y_prop: FactorPoint | None = retract(Y, eta, 1.0)
        except RetractionError:
            log_event(logging.WARNING, "Trust-region step left the manifold", "step_halved", radius=delta)
            Y_prop = None

        rho = math.nan
        f_prop = math.inf
        if Y_prop is not None:
            f_prop = p.cost(Y_prop)
            rho_reg = max(1.0, abs(f)) * float(np.spacing(1.0)) * tr.rho_regularization
            rho = (f - f_prop + rho_reg) / (model_decrease + rho_reg) if model_decrease > 0 else math.nan

        model_decreased = model_decrease > 0
        on_boundary = step.stop in BOUNDARY_STOPS or eta.norm() >= delta * (1 - 1e-10)
        if not model_decreased or math.isnan(rho) or rho < tr.rho_shrink:
            delta *= tr.shrink_factor
        elif rho > tr.rho_expand and on_boundary:
            delta = min(tr.expand_factor * delta, tr.delta_max)

        accepted = Y_prop is not None and model_decreased and rho > tr.rho_accept and f_prop <= f
        if accepted and Y_prop is not None:
            Y, f = Y_prop, f_prop
            grad = p.riemannian_gradient(Y)
            gn = grad.norm()

        trace.inner_iterations.append(step.iterations)
        trace.tcg_stops.append(step.stop)
        trace.accepted.append(accepted)
        trace.record(f, gn, delta)
        if callback is not None:
            callback(trace.iterations, Y, f)

        if f < opts.cost_floor:
            status = SolverStatus.CONVERGED_COST
        elif gn < opts.grad_tol:
            status = SolverStatus.CONVERGED_GRADIENT
        elif delta < tr.min_radius:
            status = SolverStatus.STALLED

    return Y, trace.finish(status)
