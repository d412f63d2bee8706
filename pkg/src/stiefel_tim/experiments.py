"""Random topologies, channel draws, alignment metrics and parameter sweeps."""

import csv
import logging
import math
import os
import time
from collections.abc import Iterable
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np
import numpy.typing as npt

from . import constants
from .enums import ChannelModel, SolverName, SweepVariable
from .exceptions import StiefelTimError, UnsupportedCaseError
from .logging import log_event, run_id_var
from .manifold import FactorPoint, random_point
from .models.channel import ChannelRealization
from .models.common import validate_probability
from .models.network import NetworkInstance
from .models.options import SolverOptions
from .models.report import SolverReport
from .models.results import BeamformerSet
from .models.sweep import MetricSummary, SweepConfig, SweepResult, SweepRow, SweepSummaryRow
from .problem import ProblemHandle, build_affine_system, make_problem
from .rank_search import beamformers_from_factor, extract_beamformers, minimize_rank
from .rng import child_seed, complex_gaussian, generator
from .solvers import rtr_solve, solve_fixed_rank


SUMMARY_METRICS = ("rank", "dof", "residual", "leakage", "sum_rate", "iters", "seconds")

_TOPOLOGY_STREAM = 0
_SEARCH_STREAM = 1
_CHANNEL_STREAM = 2


def random_topology(K: int, p: float, q: float, d: int = 1, seed: int = 0) -> NetworkInstance:
    """Draw a partially connected network with random message sharing.

    Off-diagonal link (k, j) is present with probability p; transmitter j holds message
    i ≠ j with probability q. Direct links and own messages are always present.

    Args:
        K: Number of users
        p: Connection probability
        q: Sharing probability
        d: Streams per user
        seed: Integer seed

    Returns:
        Random instance

    Raises:
        ValueError: If p or q is outside [0, 1]
    """
    validate_probability(p)
    validate_probability(q)
    rng = generator(seed)
    links = rng.random((K, K)) < p
    shares = rng.random((K, K)) < q
    edges = [(k, j) for k in range(K) for j in range(K) if k == j or links[k, j]]
    sharing = [[i for i in range(K) if i == j or shares[j, i]] for j in range(K)]
    return NetworkInstance.build(K=K, d=d, edges=edges, sharing=sharing)


def path_loss_db(distance_km: float | npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Path loss L(d) = 128.1 + 37.6·log₁₀ d in dB, d in kilometres."""
    d = np.asarray(distance_km, dtype=np.float64)
    out: npt.NDArray[np.float64] = constants.PATHLOSS_INTERCEPT_DB + constants.PATHLOSS_SLOPE_DB * np.log10(d)
    return out


def sample_channels(
    inst: NetworkInstance,
    model: ChannelModel = ChannelModel.GENERIC_GAUSSIAN,
    seed: int = 0,
) -> ChannelRealization:
    """Draw channel coefficients on the edge set.

    ``generic_gaussian`` draws h ~ CN(0, 1) with unit noise power. ``pathloss_rayleigh``
    draws link distances uniformly in [0.1, 0.2] km and sets h = 10^{−L(d)/20}·c with
    c ~ CN(0, 1) and noise power 10⁻¹². Gains off the edge set are zero.
    """
    rng = generator(seed)
    K = inst.K
    mask = np.zeros((K, K), dtype=bool)
    for k, j in inst.edges:
        mask[k, j] = True
    fading = complex_gaussian(rng, (K, K))
    if model is ChannelModel.GENERIC_GAUSSIAN:
        return ChannelRealization(
            channel_model=model,
            gains=np.where(mask, fading, 0),
            noise_power=constants.NOISE_POWER_GENERIC,
        )
    low, high = constants.DISTANCE_RANGE_KM
    distances = rng.uniform(low, high, size=(K, K))
    amplitude = 10.0 ** (-path_loss_db(distances) / 20.0)
    return ChannelRealization(
        channel_model=model,
        gains=np.where(mask, amplitude * fading, 0),
        noise_power=constants.NOISE_POWER_PATHLOSS,
        distances_km=np.where(mask, distances, 0.0),
    )


def _cross_terms(
    inst: NetworkInstance,
    ch: ChannelRealization,
    bf: BeamformerSet,
    k: int,
) -> list[npt.NDArray[np.complex128]]:
    """h_kj·U_kᴴ·V_ji for every connected j and i ∈ S_j with i ≠ k."""
    u_h = bf.receive[k].conj().T
    return [
        ch.h(k, j) * (u_h @ bf.precoder(j, i))
        for j in inst.connected_transmitters(k)
        for i in sorted(inst.sharing[j])
        if i != k
    ]


def _desired_sum(
    inst: NetworkInstance,
    ch: ChannelRealization,
    bf: BeamformerSet,
    k: int,
) -> npt.NDArray[np.complex128]:
    u_h = bf.receive[k].conj().T
    total = np.zeros((inst.d[k], inst.d[k]), dtype=np.complex128)
    for j in inst.desired_transmitters(k):
        total += ch.h(k, j) * (u_h @ bf.precoder(j, k))
    return total


def verify_alignment(
    inst: NetworkInstance,
    ch: ChannelRealization,
    bf: BeamformerSet,
    tol: float = constants.ALIGNMENT_TOL,
) -> bool:
    """Check the channel-dependent alignment conditions for one channel draw.

    Receiver k passes when |det Σ_j h_kj U_kᴴ V_jk| > tol·s_k^{d_k} and every cross term
    ‖h_kj U_kᴴ V_ji‖_F (i ≠ k) is below tol·s_k, where s_k is the largest
    |h_kj|·‖U_k‖_F·‖V_ji‖_F over the terms reaching receiver k.
    """
    for k in range(inst.K):
        u_norm = float(np.linalg.norm(bf.receive[k]))
        scale = max(
            abs(ch.h(k, j)) * u_norm * float(np.linalg.norm(bf.precoder(j, i)))
            for j in inst.connected_transmitters(k)
            for i in inst.sharing[j]
        )
        if scale == 0:
            return False
        if abs(np.linalg.det(_desired_sum(inst, ch, bf, k))) <= tol * scale ** inst.d[k]:
            return False
        if any(float(np.linalg.norm(term)) >= tol * scale for term in _cross_terms(inst, ch, bf, k)):
            return False
    return True


def interference_leakage(inst: NetworkInstance, ch: ChannelRealization, bf: BeamformerSet) -> float:
    """Σ ‖T·Tᴴ‖_F² over cross terms T = h_kj U_kᴴ V_ji, i ∈ S_j, i ≠ k."""
    total = 0.0
    for k in range(inst.K):
        for term in _cross_terms(inst, ch, bf, k):
            outer = term @ term.conj().T
            total += float(np.vdot(outer, outer).real)
    return total


def sum_rate(inst: NetworkInstance, ch: ChannelRealization, bf: BeamformerSet, power: float = 1.0) -> float:
    """Sum rate (1/r)·Σ_k log₂(1 + SINR_k) in bits per channel use.

    Precoders are scaled by √P. SINR_k = |Σ_j h_kj u_kᴴ v_jk|² divided by the
    interference Σ_{i≠k} |Σ_j h_kj u_kᴴ v_ji|² plus ‖u_k‖²σ².

    Raises:
        UnsupportedCaseError: If any user has more than one stream
        ValueError: If power is not positive
    """
    if not inst.single_stream:
        msg = "Sum rate is only defined for single-stream instances"
        raise UnsupportedCaseError(msg)
    if power <= 0:
        msg = f"Transmit power must be positive, got {power}"
        raise ValueError(msg)
    bf = bf.scaled(math.sqrt(power))
    rate = 0.0
    for k in range(inst.K):
        u_h = bf.receive[k].conj().T
        desired = complex(_desired_sum(inst, ch, bf, k)[0, 0])
        interference = 0.0
        for i in range(inst.K):
            if i == k:
                continue
            coherent = 0j
            for j in inst.connected_transmitters(k):
                if i in inst.sharing[j]:
                    coherent += ch.h(k, j) * complex((u_h @ bf.precoder(j, i))[0, 0])
            interference += abs(coherent) ** 2
        noise = float(np.vdot(bf.receive[k], bf.receive[k]).real) * ch.noise_power
        denom = interference + noise
        signal = abs(desired) ** 2
        if signal == 0:
            sinr = 0.0
        elif denom == 0:
            sinr = math.inf
        else:
            sinr = signal / denom
        rate += math.log2(1.0 + sinr)
    return rate / bf.rank


def leakage_trace(
    inst: NetworkInstance,
    channels: ChannelRealization,
    rank: int,
    seed: int = 0,
    opts: SolverOptions | None = None,
) -> list[tuple[float, float]]:
    """(objective, interference leakage) after every RTR iteration at a fixed rank.

    Beamformers are read off the iterate as U = Lᴴ, V = Rᴴ.
    """
    trace: list[tuple[float, float]] = []

    def record(_iteration: int, Y: FactorPoint, cost: float) -> None:
        trace.append((cost, interference_leakage(inst, channels, beamformers_from_factor(Y, inst))))

    problem = make_problem(inst, rank)
    rtr_solve(problem, random_point(inst.N, rank, seed), opts, record)
    return trace


def compare_convergence(
    inst: NetworkInstance,
    rank: int,
    solvers: Iterable[SolverName] = tuple(SolverName),
    seed: int = 0,
    opts: SolverOptions | None = None,
) -> dict[SolverName, SolverReport]:
    """Run each solver at a fixed rank from one shared random start."""
    system = build_affine_system(inst)
    Y0 = random_point(inst.N, rank, seed)
    reports: dict[SolverName, SolverReport] = {}
    for solver in solvers:
        _, reports[solver] = solve_fixed_rank(ProblemHandle(system, rank), solver, Y0, opts)
    return reports


def _trial_rows(
    cfg: SweepConfig,
    opts: SolverOptions | None,
    grid: list[tuple[int, float]],
    trial: int,
) -> list[SweepRow]:
    """Solve one trial and evaluate it at each (grid index, value) in ``grid``.

    Power sweeps pass the whole grid so one topology and solution serve every power.
    """
    seed_index = grid[0][0] if cfg.variable is not SweepVariable.POWER else 0
    p, q, _ = cfg.point(grid[0][1])
    token = run_id_var.set(f"{cfg.variable.value}={grid[0][1]}/trial={trial}")
    try:
        inst = random_topology(cfg.K, p, q, cfg.d, child_seed(cfg.seed, seed_index, trial, _TOPOLOGY_STREAM))
        channels = sample_channels(inst, cfg.channel_model, child_seed(cfg.seed, seed_index, trial, _CHANNEL_STREAM))
        search_seed = child_seed(cfg.seed, seed_index, trial, _SEARCH_STREAM)
        rows: list[SweepRow] = []
        for solver in cfg.solvers:
            started = time.perf_counter()
            try:
                result = minimize_rank(
                    inst,
                    solver,
                    opts,
                    cfg.restarts,
                    search_seed,
                    acceptance=cfg.acceptance,
                    residual_tol=cfg.residual_tol,
                    max_rank=cfg.max_rank,
                )
                bf = extract_beamformers(result.X, inst, result.rank)
                leakage = interference_leakage(inst, channels, bf)
            except StiefelTimError as e:
                log_event(
                    logging.WARNING,
                    "Sweep trial failed",
                    "sweep_trial_failed",
                    solver=solver.value,
                    trial=trial,
                    error=type(e).__name__,
                    detail=str(e),
                )
                rows.extend(
                    SweepRow(sweep_var=cfg.variable, value=value, solver=solver, trial=trial) for _, value in grid
                )
                continue
            seconds = time.perf_counter() - started if cfg.record_timing else None
            for _, value in grid:
                power = cfg.point(value)[2]
                rows.append(
                    SweepRow(
                        sweep_var=cfg.variable,
                        value=value,
                        solver=solver,
                        trial=trial,
                        rank=result.rank,
                        dof=cfg.d / result.rank,
                        residual=result.residual,
                        leakage=leakage,
                        sum_rate=sum_rate(inst, channels, bf, power) if inst.single_stream else None,
                        iters=result.iterations,
                        seconds=seconds,
                    ),
                )
            log_event(
                logging.INFO,
                "Sweep trial finished",
                "sweep_trial",
                solver=solver.value,
                trial=trial,
                rank=result.rank,
            )
        return rows
    finally:
        run_id_var.reset(token)


def _run_task(task: tuple[SweepConfig, SolverOptions | None, list[tuple[int, float]], int]) -> list[SweepRow]:
    cfg, opts, grid, trial = task
    return _trial_rows(cfg, opts, grid, trial)


def _summarize(cfg: SweepConfig, rows: list[SweepRow]) -> list[SweepSummaryRow]:
    summary: list[SweepSummaryRow] = []
    for value in cfg.values:
        for solver in cfg.solvers:
            group = [row for row in rows if row.value == value and row.solver is solver]
            metrics: dict[str, MetricSummary] = {}
            for name in SUMMARY_METRICS:
                samples = np.array([getattr(row, name) for row in group if getattr(row, name) is not None], dtype=float)
                if samples.size == 0:
                    metrics[name] = MetricSummary()
                    continue
                stderr = float(samples.std(ddof=1) / math.sqrt(samples.size)) if samples.size > 1 else 0.0
                metrics[name] = MetricSummary(mean=float(samples.mean()), stderr=stderr, count=int(samples.size))
            summary.append(
                SweepSummaryRow(
                    sweep_var=cfg.variable,
                    value=value,
                    solver=solver,
                    trials=len(group),
                    failed=sum(row.failed for row in group),
                    metrics=metrics,
                ),
            )
    return summary


def run_sweep(cfg: SweepConfig, opts: SolverOptions | None = None, jobs: int | None = None) -> SweepResult:
    """Run every (grid value, trial) and every solver, then aggregate.

    Trials are independent and seeded by (grid index, trial), so results do not depend
    on ``jobs``. With ``jobs`` > 1 trials run in a process pool. A trial whose search
    fails yields rows with empty metric cells.

    Args:
        cfg: Sweep configuration
        opts: Solver options
        jobs: Worker processes (default: CPU count)

    Returns:
        Sorted rows and per-point mean/standard-error summaries
    """
    if cfg.variable is SweepVariable.POWER:
        grid = list(enumerate(cfg.values))
        tasks = [(cfg, opts, grid, t) for t in range(cfg.trials)]
    else:
        tasks = [(cfg, opts, [(gi, value)], t) for gi, value in enumerate(cfg.values) for t in range(cfg.trials)]

    workers = jobs or os.cpu_count() or 1
    if workers == 1 or len(tasks) == 1:
        batches = [_run_task(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(_run_task, tasks))

    value_index = {value: gi for gi, value in enumerate(cfg.values)}
    solver_index = {solver: si for si, solver in enumerate(cfg.solvers)}
    rows = sorted(
        (row for batch in batches for row in batch),
        key=lambda row: (value_index[row.value], solver_index[row.solver], row.trial),
    )
    return SweepResult(config=cfg, rows=rows, summary=_summarize(cfg, rows))


def write_sweep_csv(result: SweepResult, path: str | Path) -> Path:
    """Write one CSV line per row under the fixed column header."""
    target = Path(path)
    with target.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(constants.SWEEP_CSV_COLUMNS)
        writer.writerows(row.csv_cells() for row in result.rows)
    return target


def write_sweep_summary(result: SweepResult, path: str | Path) -> Path:
    """Write the JSON summary (config plus per-point statistics)."""
    target = Path(path)
    target.write_text(result.summary_json() + "\n", encoding="utf-8")
    return target
