"""Fixed-rank solvers: RTR, RCG and the AltMin baseline."""

from stiefel_tim.enums import SolverName
from stiefel_tim.manifold import FactorPoint
from stiefel_tim.models.options import SolverOptions
from stiefel_tim.models.report import SolverReport
from stiefel_tim.problem import ProblemHandle

from .altmin import altmin_factors, altmin_solve
from .base import IterateCallback, LineSearchOutcome, TraceRecorder, armijo_backtracking
from .rcg import hestenes_stiefel_beta, rcg_solve
from .rtr import TcgResult, model_value, rtr_solve, truncated_cg


def solve_fixed_rank(
    p: ProblemHandle,
    solver: SolverName,
    Y0: FactorPoint,
    opts: SolverOptions | None = None,
    callback: IterateCallback | None = None,
) -> tuple[FactorPoint, SolverReport]:
    """Run the named solver from Y0.

    Args:
        p: Fixed-rank problem
        solver: Which method to run
        Y0: Starting factor
        opts: Solver options
        callback: Iterate callback

    Returns:
        Final factor and report
    """
    if solver is SolverName.RTR:
        return rtr_solve(p, Y0, opts, callback)
    if solver is SolverName.RCG:
        return rcg_solve(p, Y0, opts, callback)
    return altmin_factors(p, Y0, opts, callback)


__all__ = [
    "IterateCallback",
    "LineSearchOutcome",
    "TcgResult",
    "TraceRecorder",
    "altmin_factors",
    "altmin_solve",
    "armijo_backtracking",
    "hestenes_stiefel_beta",
    "model_value",
    "rcg_solve",
    "rtr_solve",
    "solve_fixed_rank",
    "truncated_cg",
]
