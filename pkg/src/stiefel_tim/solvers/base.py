"""Pieces shared by the fixed-rank solvers: trace recording, Armijo search, callbacks."""

import logging
import math
import time
from collections.abc import Callable
from dataclasses import dataclass
from typing import Generic, TypeVar

from stiefel_tim.enums import SolverName, SolverStatus, TcgStop
from stiefel_tim.exceptions import RetractionError
from stiefel_tim.logging import log_event
from stiefel_tim.manifold import FactorPoint
from stiefel_tim.models.options import SolverOptions
from stiefel_tim.models.report import SolverReport


T = TypeVar("T")

IterateCallback = Callable[[int, FactorPoint, float], None]
"""Called as ``callback(iteration, point, cost)`` after every outer iteration (and once for the start point)."""


class TraceRecorder:
    """Accumulates per-iteration traces and builds the final report."""

    def __init__(self, solver: SolverName, rank: int) -> None:
        self.solver = solver
        self.rank = rank
        self._start = time.perf_counter()
        self.objective: list[float] = []
        self.grad_norm: list[float] = []
        self.step: list[float] = []
        self.elapsed: list[float] = []
        self.inner_iterations: list[int] = []
        self.tcg_stops: list[TcgStop] = []
        self.accepted: list[bool] = []

    @property
    def iterations(self) -> int:
        return max(len(self.objective) - 1, 0)

    def record(self, cost: float, grad_norm: float, step: float) -> None:
        self.objective.append(cost)
        self.grad_norm.append(grad_norm)
        self.step.append(step)
        self.elapsed.append(time.perf_counter() - self._start)
        log_event(
            logging.DEBUG,
            "Solver iteration",
            "solver_iteration",
            solver=self.solver.value,
            rank=self.rank,
            iteration=self.iterations,
            cost=cost,
            grad_norm=grad_norm,
            step=step,
        )

    def finish(self, status: SolverStatus) -> SolverReport:
        """Build the report and log the outcome."""
        report = SolverReport(
            solver=self.solver,
            rank=self.rank,
            iterations=self.iterations,
            objective_trace=self.objective,
            grad_norm_trace=self.grad_norm,
            step_trace=self.step,
            time_trace=self.elapsed,
            status=status,
            seconds=time.perf_counter() - self._start,
            inner_iterations=self.inner_iterations,
            tcg_stops=self.tcg_stops,
            accepted=self.accepted,
        )
        log_event(
            logging.INFO,
            "Solver finished",
            "solver_done",
            solver=self.solver.value,
            rank=self.rank,
            iterations=report.iterations,
            status=status.value,
            cost=report.final_cost,
            grad_norm=report.final_grad_norm,
            seconds=report.seconds,
        )
        return report


def log_start(solver: SolverName, rank: int, cost: float, grad_norm: float) -> None:
    log_event(
        logging.INFO,
        "Solver started",
        "solver_start",
        solver=solver.value,
        rank=rank,
        cost=cost,
        grad_norm=grad_norm,
    )


def initial_status(cost: float, grad_norm: float, opts: SolverOptions) -> SolverStatus | None:
    """Status if the start point already satisfies a stopping rule, else None."""
    if cost < opts.cost_floor:
        return SolverStatus.CONVERGED_COST
    if grad_norm < opts.grad_tol:
        return SolverStatus.CONVERGED_GRADIENT
    return None


@dataclass(frozen=True)
class LineSearchOutcome(Generic[T]):
    """Accepted Armijo step."""

    step: float
    cost: float
    point: T
    backtracks: int


def armijo_backtracking(
    f0: float,
    slope: float,
    trial: Callable[[float], tuple[T, float]],
    opts: SolverOptions,
    initial_step: float | None = None,
) -> LineSearchOutcome[T] | None:
    """Backtrack until f(step) ≤ f0 + c₁·step·slope.

    A ``RetractionError`` from ``trial`` halves the step; more than
    ``opts.max_step_halvings`` such failures, or more than ``armijo.max_backtracks``
    rejected steps, ends the search.

    Args:
        f0: Cost at the current point
        slope: Directional derivative along the search direction (negative)
        trial: Maps a step length to (new point, cost), may raise RetractionError
        opts: Solver options
        initial_step: First trial step (defaults to ``armijo.initial_step``)

    Returns:
        The accepted step, or None if the search failed
    """
    armijo = opts.armijo
    step = armijo.initial_step if initial_step is None else initial_step
    backtracks = 0
    halvings = 0
    while True:
        try:
            point, f = trial(step)
        except RetractionError:
            halvings += 1
            log_event(logging.WARNING, "Retraction left the manifold, halving step", "step_halved", step=step)
            if halvings > opts.max_step_halvings:
                return None
            step *= 0.5
            continue
        if math.isfinite(f) and f <= f0 + armijo.c1 * step * slope:
            return LineSearchOutcome(step=step, cost=f, point=point, backtracks=backtracks)
        backtracks += 1
        if backtracks > armijo.max_backtracks:
            return None
        step *= armijo.backtrack
