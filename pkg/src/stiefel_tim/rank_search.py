"""Rank-increase search, solution recovery and beamformer extraction.

The search solves the fixed-rank subproblem for r = 1, 2, ... and stops at the first
rank whose best restart meets the acceptance rule. The achieved DoF of user k is
d_k / r*.
"""

import contextvars
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import NamedTuple

import numpy as np
import numpy.typing as npt

from .constants import COST_EPSILON, RESIDUAL_TOL
from .enums import AcceptanceRule, SolverName
from .exceptions import (
    DimensionError,
    InternalConsistencyError,
    RankDeficiencyError,
    RankSearchExhaustedError,
    StiefelTimError,
    UnsupportedCaseError,
)
from .linalg import ComplexMatrix, as_complex, numeric_rank, svd
from .logging import log_event, run_id_var
from .manifold import FactorPoint, pad_point, random_point
from .models.network import NetworkInstance
from .models.options import SolverOptions
from .models.report import SolverReport
from .models.results import BeamformerSet, RankAttempt, RankSearchResult
from .problem import AffineSystem, ProblemHandle, build_affine_system, residual
from .rng import child_seed
from .solvers import IterateCallback, solve_fixed_rank


class _Restart(NamedTuple):
    point: FactorPoint
    report: SolverReport
    residual: float
    cost: float


def recover_X(Y: FactorPoint | npt.ArrayLike, m: int, n: int) -> ComplexMatrix:
    """Recover X = L·Rᴴ from Y = [L; R].

    Args:
        Y: (m+n)×r factor
        m: Rows of X
        n: Columns of X

    Returns:
        m×n matrix of rank at most r

    Raises:
        DimensionError: If Y does not have m+n rows
    """
    y = Y.matrix if isinstance(Y, FactorPoint) else as_complex(Y, "Y")
    if y.shape[0] != m + n:
        msg = "Factor height must equal m + n"
        raise DimensionError(msg, expected=m + n, actual=y.shape[0])
    out: ComplexMatrix = y[:m] @ y[m:].conj().T
    return out


def _accepts(rule: AcceptanceRule, res: float, cost: float, residual_tol: float, cost_eps: float) -> bool:
    if rule is AcceptanceRule.COST:
        return cost < cost_eps
    return res < residual_tol


def _score(rule: AcceptanceRule, attempt: _Restart) -> float:
    return attempt.cost if rule is AcceptanceRule.COST else attempt.residual


def _run_restart(
    system: AffineSystem,
    solver: SolverName,
    Y0: FactorPoint,
    opts: SolverOptions,
    run_id: str,
    callback: IterateCallback | None,
) -> _Restart:
    token = run_id_var.set(run_id)
    try:
        problem = ProblemHandle(system, Y0.rank)
        Y, report = solve_fixed_rank(problem, solver, Y0, opts, callback)
        X = recover_X(Y, system.m, system.n)
        return _Restart(Y, report, residual(system, X), report.final_cost)
    finally:
        run_id_var.reset(token)


def _start_points(
    N: int,
    r: int,
    restarts: int,
    seed: int,
    previous: FactorPoint | None,
) -> list[FactorPoint]:
    starts: list[FactorPoint] = []
    for t in range(restarts):
        s = child_seed(seed, r, t)
        if t == 0 and previous is not None:
            try:
                starts.append(pad_point(previous, s))
                continue
            except RankDeficiencyError:
                log_event(logging.WARNING, "Warm start is rank-deficient, drawing at random", "point_redrawn", rank=r)
        starts.append(random_point(N, r, s))
    return starts


def _run_rank(
    system: AffineSystem,
    solver: SolverName,
    starts: list[FactorPoint],
    opts: SolverOptions,
    r: int,
    jobs: int,
    callback: IterateCallback | None,
) -> list[_Restart | None]:
    """Solve from every start point; a restart that raises yields None."""
    run_ids = [f"rank={r}/restart={t}" for t in range(len(starts))]
    if jobs <= 1 or len(starts) == 1:
        outcomes: list[_Restart | None] = []
        for t, Y0 in enumerate(starts):
            try:
                outcomes.append(_run_restart(system, solver, Y0, opts, run_ids[t], callback))
            except StiefelTimError as e:
                _log_restart_failure(r, t, e)
                outcomes.append(None)
        return outcomes

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = [
            pool.submit(contextvars.copy_context().run, _run_restart, system, solver, Y0, opts, run_ids[t], callback)
            for t, Y0 in enumerate(starts)
        ]
        outcomes = []
        for t, future in enumerate(futures):
            try:
                outcomes.append(future.result())
            except StiefelTimError as e:
                _log_restart_failure(r, t, e)
                outcomes.append(None)
    return outcomes


def minimize_rank(
    inst: NetworkInstance,
    solver: SolverName = SolverName.RTR,
    opts: SolverOptions | None = None,
    restarts: int = 3,
    seed: int = 0,
    *,
    acceptance: AcceptanceRule = AcceptanceRule.RESIDUAL,
    residual_tol: float = RESIDUAL_TOL,
    cost_eps: float = COST_EPSILON,
    max_rank: int | None = None,
    warm_start: bool = False,
    jobs: int = 1,
    callback: IterateCallback | None = None,
    system: AffineSystem | None = None,
) -> RankSearchResult:
    """Find the smallest rank whose fixed-rank subproblem the solver drives to feasibility.

    For r = 1..max_rank, ``restarts`` independent solves start from seeded random
    points (restart t at rank r uses ``child_seed(seed, r, t)``). The best restart is
    judged by the acceptance rule: the m^{-1/2} residual of X = LRᴴ below
    ``residual_tol``, or f(Y) below ``cost_eps``. The residual is recomputed from X
    rather than taken from the solver. Restarts that raise are counted as failures.

    Args:
        inst: Network instance
        solver: Fixed-rank method
        opts: Solver options
        restarts: Independent solves per rank
        seed: Base seed
        acceptance: Which rule accepts a rank
        residual_tol: Residual threshold for ``AcceptanceRule.RESIDUAL``
        cost_eps: Cost threshold for ``AcceptanceRule.COST``
        max_rank: Largest rank tried (default N)
        warm_start: Start restart 0 at rank r+1 from the best rank-r factor plus a small column
        jobs: Restarts run concurrently on this many threads
        callback: Iterate callback forwarded to every solve
        system: Prebuilt affine system for ``inst``

    Returns:
        Result at the accepted rank

    Raises:
        RankSearchExhaustedError: If no rank up to ``max_rank`` was accepted
    """
    if restarts < 1:
        msg = "restarts must be ≥ 1"
        raise ValueError(msg)
    opts = opts or SolverOptions()
    system = system or build_affine_system(inst)
    cap = min(max_rank or system.N, system.N)
    per_rank: list[RankAttempt] = []
    reports: list[SolverReport] = []
    previous: FactorPoint | None = None

    for r in range(1, cap + 1):
        starts = _start_points(system.N, r, restarts, seed, previous if warm_start else None)
        outcomes = _run_rank(system, solver, starts, opts, r, jobs, callback)
        finished = [o for o in outcomes if o is not None]
        best = min(finished, key=lambda o: _score(acceptance, o)) if finished else None
        accepted = best is not None and _accepts(acceptance, best.residual, best.cost, residual_tol, cost_eps)
        attempt = RankAttempt(
            rank=r,
            attempts=len(starts),
            failures=len(outcomes) - len(finished),
            best_residual=best.residual if best else None,
            best_cost=best.cost if best else None,
            iterations=sum(o.report.iterations for o in finished),
            accepted=accepted,
        )
        per_rank.append(attempt)
        log_event(
            logging.INFO,
            "Rank attempted",
            "rank_attempt",
            solver=solver.value,
            rank=r,
            attempts=attempt.attempts,
            failures=attempt.failures,
            best_residual=attempt.best_residual,
            best_cost=attempt.best_cost,
        )
        if best is None:
            continue
        reports.append(best.report)
        previous = best.point if r < system.N else None

        if accepted:
            X = recover_X(best.point, system.m, system.n)
            log_event(
                logging.INFO,
                "Rank accepted",
                "rank_accepted",
                solver=solver.value,
                rank=r,
                residual=best.residual,
                cost=best.cost,
            )
            return RankSearchResult(
                rank=r,
                X=X,
                point=best.point,
                dof=[dk / r for dk in inst.d],
                residual=best.residual,
                cost=best.cost,
                solver=solver,
                acceptance=acceptance,
                reports=reports,
                per_rank=per_rank,
            )

    log_event(logging.ERROR, "No rank met the acceptance rule", "rank_search_exhausted", max_rank=cap)
    msg = f"No rank up to {cap} met the {acceptance.value} acceptance rule"
    raise RankSearchExhaustedError(msg, per_rank=[a.to_json_dict() for a in per_rank])


def _log_restart_failure(r: int, t: int, error: StiefelTimError) -> None:
    log_event(
        logging.WARNING,
        "Restart failed",
        "rank_attempt",
        rank=r,
        restart=t,
        error=type(error).__name__,
        detail=str(error),
    )


def _normalize_per_transmitter(
    inst: NetworkInstance,
    precoders: dict[tuple[int, int], ComplexMatrix],
) -> dict[tuple[int, int], ComplexMatrix]:
    out = dict(precoders)
    for j in range(inst.K):
        keys = [(j, i) for i in sorted(inst.sharing[j])]
        power = math.sqrt(sum(float(np.vdot(out[key], out[key]).real) for key in keys))
        if power > 0:
            for key in keys:
                out[key] = out[key] / power
    return out


def _partition(
    inst: NetworkInstance,
    U_hat: ComplexMatrix,
    V_hat: ComplexMatrix,
    r: int,
    *,
    normalize: bool,
) -> BeamformerSet:
    ro = inst.row_offsets
    receive = [np.array(U_hat[:, ro[k] : ro[k] + inst.d[k]]) for k in range(inst.K)]
    precoders: dict[tuple[int, int], ComplexMatrix] = {}
    for j in range(inst.K):
        for i in sorted(inst.sharing[j]):
            start = inst.column_offset(j, i)
            precoders[(j, i)] = np.array(V_hat[:, start : start + inst.d[i]])
    if normalize:
        precoders = _normalize_per_transmitter(inst, precoders)
    return BeamformerSet(rank=r, d=list(inst.d), receive=receive, precoders=precoders)


def extract_beamformers(
    X: npt.ArrayLike,
    inst: NetworkInstance,
    r: int,
    *,
    normalize: bool = True,
) -> BeamformerSet:
    """Split X ≈ U_r Σ_r V_rᴴ into receive filters and precoders.

    With Û = (U_r Σ_r^{1/2})ᴴ and V̂ = (V_r Σ_r^{1/2})ᴴ, X = ÛᴴV̂. Receive filter U_k takes
    the columns of Û in receiver k's row block; precoder V_ji takes the columns of V̂
    in block (transmitter j, message i). With ``normalize`` the precoders of every
    transmitter are scaled to unit total Frobenius norm.

    Args:
        X: m×n solution
        inst: Network instance
        r: Rank (rows of every beamformer)
        normalize: Apply per-transmitter power normalization

    Returns:
        Beamformer set

    Raises:
        DimensionError: If X is not m×n
        InternalConsistencyError: If X has numeric rank above r
    """
    x = as_complex(X, "X")
    if x.shape != (inst.m, inst.n):
        msg = "X must be m×n"
        raise DimensionError(msg, expected=(inst.m, inst.n), actual=x.shape)
    U, sigma, V = svd(x)
    rank = numeric_rank(sigma)
    if rank > r:
        msg = f"X has numeric rank {rank}, above the requested {r}"
        raise InternalConsistencyError(msg)
    kept = min(r, sigma.size)
    root = np.sqrt(sigma[:kept])
    U_hat = np.zeros((r, inst.m), dtype=np.complex128)
    V_hat = np.zeros((r, inst.n), dtype=np.complex128)
    U_hat[:kept] = (U[:, :kept] * root).conj().T
    V_hat[:kept] = (V[:, :kept] * root).conj().T
    return _partition(inst, U_hat, V_hat, r, normalize=normalize)


def beamformers_from_factor(Y: FactorPoint, inst: NetworkInstance, *, normalize: bool = False) -> BeamformerSet:
    """Read beamformers straight off Y = [L; R] as U = Lᴴ and V = Rᴴ.

    Raises:
        DimensionError: If Y does not have N rows
    """
    if Y.shape[0] != inst.N:
        msg = "Factor height must equal N"
        raise DimensionError(msg, expected=inst.N, actual=Y.shape[0])
    L, R = Y.split(inst.m)
    return _partition(inst, L.conj().T, R.conj().T, Y.rank, normalize=normalize)


def nuclear_norm_analytic_optimum(sys: AffineSystem, inst: NetworkInstance) -> tuple[ComplexMatrix, bool]:
    """Closed-form minimizer of the nuclear norm subject to the alignment constraints.

    Row k of X* holds 1/|D_k| on the desired columns of receiver k (connected
    transmitters holding message k) and zeros elsewhere. The minimizer is always
    full rank, so nuclear-norm relaxation cannot reduce the rank.

    Args:
        sys: Affine system of ``inst``
        inst: Single-stream instance

    Returns:
        X* and whether it has full numeric rank

    Raises:
        UnsupportedCaseError: If any d_k > 1
        InternalConsistencyError: If X* does not satisfy the constraints
    """
    if not inst.single_stream:
        msg = "Analytic nuclear-norm optimum is only available for single-stream instances"
        raise UnsupportedCaseError(msg)
    X = np.zeros((inst.m, inst.n), dtype=np.complex128)
    for k in range(inst.K):
        desired = inst.desired_transmitters(k)
        for j in desired:
            X[k, inst.column_offset(j, k)] = 1.0 / len(desired)
    if not np.allclose(sys.apply(X), sys.b, rtol=0.0, atol=1e-12):
        msg = "Analytic nuclear-norm optimum violates the alignment constraints"
        raise InternalConsistencyError(msg)
    sigma = svd(X).sigma
    return X, numeric_rank(sigma) == inst.m
