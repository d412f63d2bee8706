import csv
import json

import numpy as np
import pytest


@pytest.fixture
def solved(three_user_instance):
    from stiefel_tim.enums import AcceptanceRule
    from stiefel_tim.rank_search import extract_beamformers, minimize_rank

    result = minimize_rank(three_user_instance, restarts=3, acceptance=AcceptanceRule.COST, cost_eps=1e-14)
    return result, extract_beamformers(result.X, three_user_instance, result.rank)


def test_random_topology_forces_direct_links_and_own_messages():
    from stiefel_tim.experiments import random_topology

    inst = random_topology(6, 0.0, 0.0, seed=1)
    assert inst.edges == frozenset((k, k) for k in range(6))
    assert inst.sharing == tuple(frozenset({j}) for j in range(6))


def test_random_topology_full():
    from stiefel_tim.experiments import random_topology

    inst = random_topology(4, 1.0, 1.0, d=2, seed=1)
    assert len(inst.edges) == 16
    assert all(len(s) == 4 for s in inst.sharing)
    assert inst.d == (2, 2, 2, 2)


def test_random_topology_deterministic():
    from stiefel_tim.experiments import random_topology

    assert random_topology(5, 0.4, 0.6, seed=9) == random_topology(5, 0.4, 0.6, seed=9)


def test_random_topology_rejects_bad_probability():
    from stiefel_tim.experiments import random_topology

    with pytest.raises(ValueError, match="Invalid probability"):
        random_topology(3, 1.2, 0.5)


def test_path_loss():
    from stiefel_tim.experiments import path_loss_db

    assert float(path_loss_db(1.0)) == pytest.approx(128.1)
    assert float(path_loss_db(0.1)) == pytest.approx(90.5)
    assert path_loss_db([0.1, 1.0]).shape == (2,)


def test_generic_channels_vanish_off_edges(three_user_instance):
    from stiefel_tim.experiments import sample_channels

    ch = sample_channels(three_user_instance, seed=4)
    for k in range(3):
        for j in range(3):
            assert (ch.h(k, j) != 0) == ((k, j) in three_user_instance.edges)
    assert ch.noise_power == 1.0
    assert ch.distances_km is None


def test_pathloss_channels(three_user_instance):
    from stiefel_tim.enums import ChannelModel
    from stiefel_tim.experiments import sample_channels

    ch = sample_channels(three_user_instance, ChannelModel.PATHLOSS_RAYLEIGH, seed=4)
    assert ch.noise_power == 1e-12
    on_edges = np.array([ch.distances_km[k, j] for k, j in three_user_instance.edges])
    assert np.all((on_edges >= 0.1) & (on_edges <= 0.2))
    assert np.abs(ch.gains).max() < 1e-3


def test_alignment_holds_for_generic_channels(three_user_instance, solved):
    from stiefel_tim.experiments import sample_channels, verify_alignment

    _, bf = solved
    for seed in range(5):
        assert verify_alignment(three_user_instance, sample_channels(three_user_instance, seed=seed), bf)


def test_alignment_fails_for_random_beamformers(three_user_instance):
    from stiefel_tim.experiments import sample_channels, verify_alignment
    from stiefel_tim.manifold import random_point
    from stiefel_tim.rank_search import beamformers_from_factor

    bf = beamformers_from_factor(random_point(three_user_instance.N, 2, 0), three_user_instance)
    assert not verify_alignment(three_user_instance, sample_channels(three_user_instance, seed=0), bf)


def test_leakage_vanishes_at_solution(three_user_instance, solved):
    from stiefel_tim.experiments import interference_leakage, sample_channels
    from stiefel_tim.manifold import random_point
    from stiefel_tim.rank_search import beamformers_from_factor

    ch = sample_channels(three_user_instance, seed=0)
    _, bf = solved
    random_bf = beamformers_from_factor(random_point(three_user_instance.N, 2, 0), three_user_instance)
    assert interference_leakage(three_user_instance, ch, bf) < 1e-12
    assert interference_leakage(three_user_instance, ch, random_bf) > 1e-6


def test_sum_rate_grows_with_power(three_user_instance, solved):
    from stiefel_tim.experiments import sample_channels, sum_rate

    ch = sample_channels(three_user_instance, seed=0)
    _, bf = solved
    rates = [sum_rate(three_user_instance, ch, bf, power) for power in (1.0, 10.0, 100.0)]
    assert rates[0] < rates[1] < rates[2]


def test_sum_rate_rejects_multi_stream():
    from stiefel_tim.exceptions import UnsupportedCaseError
    from stiefel_tim.experiments import random_topology, sample_channels, sum_rate
    from stiefel_tim.manifold import random_point
    from stiefel_tim.rank_search import beamformers_from_factor

    inst = random_topology(2, 1.0, 0.0, d=2, seed=0)
    bf = beamformers_from_factor(random_point(inst.N, 2, 0), inst)
    with pytest.raises(UnsupportedCaseError):
        sum_rate(inst, sample_channels(inst), bf)


def test_sum_rate_rejects_non_positive_power(three_user_instance, solved):
    from stiefel_tim.experiments import sample_channels, sum_rate

    _, bf = solved
    with pytest.raises(ValueError, match="positive"):
        sum_rate(three_user_instance, sample_channels(three_user_instance), bf, 0.0)


def test_leakage_trace_follows_iterations(three_user_instance):
    from stiefel_tim.experiments import leakage_trace, sample_channels
    from stiefel_tim.models.options import SolverOptions

    channels = sample_channels(three_user_instance)
    trace = leakage_trace(three_user_instance, channels, 2, seed=1, opts=SolverOptions(max_iters=10))
    assert 1 <= len(trace) <= 11
    costs = [cost for cost, _ in trace]
    assert all(b <= a for a, b in zip(costs, costs[1:], strict=False))
    assert all(leak >= 0 for _, leak in trace)


def test_compare_convergence_shares_start(three_user_instance):
    from stiefel_tim.enums import SolverName
    from stiefel_tim.experiments import compare_convergence
    from stiefel_tim.models.options import SolverOptions

    reports = compare_convergence(three_user_instance, 2, seed=3, opts=SolverOptions(max_iters=5))
    assert set(reports) == set(SolverName)
    starts = [report.objective_trace[0] for report in reports.values()]
    assert starts == pytest.approx([starts[0]] * len(starts))

def _beamformers(rank, receive, precoders):
    from stiefel_tim.models.results import BeamformerSet

    return BeamformerSet(
        rank=rank,
        d=[1] * len(receive),
        receive=[np.array(u, dtype=np.complex128).reshape(rank, 1) for u in receive],
        precoders={key: np.array(v, dtype=np.complex128).reshape(rank, 1) for key, v in precoders.items()},
    )


def _channels(gains, noise_power=1.0):
    from stiefel_tim.enums import ChannelModel
    from stiefel_tim.models.channel import ChannelRealization

    return ChannelRealization(
        channel_model=ChannelModel.GENERIC_GAUSSIAN,
        gains=np.array(gains, dtype=np.complex128),
        noise_power=noise_power,
    )


def test_leakage_of_single_cross_term():
    from stiefel_tim.experiments import interference_leakage
    from stiefel_tim.models.network import NetworkInstance

    inst = NetworkInstance.build(K=2, d=1, edges=[(0, 0), (1, 1), (0, 1)], sharing=[[0], [1]])
    bf = _beamformers(1, [[1.0], [1.0]], {(0, 0): [1.0], (1, 1): [3.0]})
    assert interference_leakage(inst, _channels([[1.0, 2.0], [0.0, 1.0]]), bf) == pytest.approx(1296.0)


def test_alignment_bounds_leakage(three_user_instance, solved):
    from stiefel_tim import constants
    from stiefel_tim.experiments import interference_leakage, sample_channels, verify_alignment

    _, bf = solved
    tol = constants.ALIGNMENT_TOL
    draws = [sample_channels(three_user_instance, seed=seed) for seed in range(10)]
    aligned = [ch for ch in draws if verify_alignment(three_user_instance, ch, bf, tol)]
    assert aligned
    for ch in aligned:
        assert interference_leakage(three_user_instance, ch, bf) < three_user_instance.K**2 * tol**2


def test_sinr_one_when_signal_matches_noise(scalar_instance):
    from stiefel_tim.experiments import sum_rate

    bf = _beamformers(2, [[1.0, 0.0]], {(0, 0): [1.0, 0.0]})
    ch = _channels([[1.0]])
    assert sum_rate(scalar_instance, ch, bf) == pytest.approx(0.5)
    assert sum_rate(scalar_instance, ch, bf, power=2.0) == pytest.approx(0.5 * np.log2(3.0))


def test_sum_rate_power_is_precoder_scaling(three_user_instance, solved):
    from stiefel_tim.experiments import sample_channels, sum_rate
    from stiefel_tim.manifold import random_point
    from stiefel_tim.rank_search import beamformers_from_factor

    ch = sample_channels(three_user_instance, seed=2)
    _, aligned = solved
    noisy = beamformers_from_factor(random_point(three_user_instance.N, 2, 5), three_user_instance)
    for bf in (aligned, noisy):
        for power in (0.5, 4.0, 100.0):
            expected = sum_rate(three_user_instance, ch, bf.scaled(np.sqrt(power)))
            assert sum_rate(three_user_instance, ch, bf, power) == pytest.approx(expected)


def test_sum_rate_ignores_receive_phase(three_user_instance, solved):
    from stiefel_tim.experiments import sample_channels, sum_rate
    from stiefel_tim.manifold import random_point
    from stiefel_tim.models.results import BeamformerSet
    from stiefel_tim.rank_search import beamformers_from_factor

    ch = sample_channels(three_user_instance, seed=1)
    _, aligned = solved
    noisy = beamformers_from_factor(random_point(three_user_instance.N, 2, 6), three_user_instance)
    phases = np.exp(1j * np.array([0.3, 2.0, -1.1]))
    for bf in (aligned, noisy):
        rotated = BeamformerSet(
            rank=bf.rank,
            d=bf.d,
            receive=[phase * u for phase, u in zip(phases, bf.receive, strict=True)],
            precoders=bf.precoders,
        )
        expected = sum_rate(three_user_instance, ch, bf, 10.0)
        assert sum_rate(three_user_instance, ch, rotated, 10.0) == pytest.approx(expected)


def test_user_without_signal_adds_no_rate():
    from stiefel_tim.experiments import sum_rate
    from stiefel_tim.models.network import NetworkInstance

    inst = NetworkInstance.build(K=2, d=1, edges=[(0, 0), (1, 1)], sharing=[[0], [1]])
    ch = _channels([[1.0, 0.0], [0.0, 1.0]])
    silent = _beamformers(1, [[0.0], [1.0]], {(0, 0): [1.0], (1, 1): [1.0]})
    assert sum_rate(inst, ch, silent) == pytest.approx(1.0)
    muted = _beamformers(1, [[1.0], [1.0]], {(0, 0): [0.0], (1, 1): [1.0]})
    assert sum_rate(inst, ch, muted) == pytest.approx(1.0)



def _sweep_config(**overrides):
    from stiefel_tim.models.sweep import SweepConfig

    data = {"K": 3, "variable": "p", "values": [0.2, 0.8], "trials": 2, "q": 0.5, "restarts": 2}
    data.update(overrides)
    return SweepConfig.model_validate(data)


def test_run_sweep_rows_and_summary():
    from stiefel_tim.experiments import run_sweep

    result = run_sweep(_sweep_config(), jobs=1)

    assert len(result.rows) == 4
    assert [(row.value, row.trial) for row in result.rows] == [(0.2, 0), (0.2, 1), (0.8, 0), (0.8, 1)]
    for row in result.rows:
        assert 1 <= row.rank <= 3
        assert row.dof == pytest.approx(1 / row.rank)
        assert row.seconds is None
    assert len(result.summary) == 2
    assert result.summary[0].metrics["rank"].count == 2
    assert not result.all_failed


def test_run_sweep_deterministic():
    from stiefel_tim.experiments import run_sweep

    first = run_sweep(_sweep_config(trials=1), jobs=1)
    second = run_sweep(_sweep_config(trials=1), jobs=1)
    assert [r.rank for r in first.rows] == [r.rank for r in second.rows]
    assert [r.leakage for r in first.rows] == [r.leakage for r in second.rows]


@pytest.mark.slow
def test_run_sweep_independent_of_worker_count():
    from stiefel_tim.experiments import run_sweep

    sequential = run_sweep(_sweep_config(), jobs=1)
    parallel = run_sweep(_sweep_config(), jobs=2)
    assert [(r.value, r.trial, r.rank) for r in sequential.rows] == [(r.value, r.trial, r.rank) for r in parallel.rows]


def test_power_sweep_reuses_one_solution_per_trial():
    from stiefel_tim.experiments import run_sweep

    result = run_sweep(_sweep_config(variable="P", values=[1.0, 100.0], trials=1, record_timing=True), jobs=1)
    assert len(result.rows) == 2
    assert result.rows[0].rank == result.rows[1].rank
    assert result.rows[0].sum_rate < result.rows[1].sum_rate
    assert all(row.seconds is not None for row in result.rows)


def test_failed_trials_leave_empty_rows(mocker):
    from stiefel_tim.exceptions import RankSearchExhaustedError
    from stiefel_tim.experiments import run_sweep

    mocker.patch("stiefel_tim.experiments.minimize_rank", side_effect=RankSearchExhaustedError("none"))
    result = run_sweep(_sweep_config(values=[0.5], trials=2), jobs=1)
    assert result.all_failed
    assert result.summary[0].failed == 2
    assert result.summary[0].metrics["rank"].mean is None


def test_write_sweep_outputs(tmp_path):
    from stiefel_tim import constants
    from stiefel_tim.experiments import run_sweep, write_sweep_csv, write_sweep_summary

    result = run_sweep(_sweep_config(values=[0.5], trials=1), jobs=1)
    csv_path = write_sweep_csv(result, tmp_path / "sweep.csv")
    summary_path = write_sweep_summary(result, tmp_path / "summary.json")

    with csv_path.open(encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == constants.SWEEP_CSV_COLUMNS
    assert len(rows) == 2
    summary = json.loads(summary_path.read_text())
    assert summary["config"]["K"] == 3
    assert summary["summary"][0]["solver"] == "rtr"


@pytest.mark.acceptance
def test_dof_decreases_with_connectivity():
    from stiefel_tim.experiments import run_sweep

    result = run_sweep(_sweep_config(K=5, values=[0.1, 0.9], trials=10, q=0.0), jobs=None)
    low, high = (row.metrics["dof"].mean for row in result.summary)
    assert low > high


def _dof(result):
    return {(row.value, row.solver): row.metrics["dof"] for row in result.summary}


def _at_least(high, low):
    """Mean of ``high`` is not below ``low`` beyond two combined standard errors."""
    slack = 2.0 * np.hypot(high.stderr or 0.0, low.stderr or 0.0)
    return high.mean + slack >= low.mean


@pytest.mark.acceptance
def test_rank_one_floor_on_full_sharing_pair(full_sharing_pair):
    from stiefel_tim.rank_search import minimize_rank

    result = minimize_rank(full_sharing_pair, restarts=100, seed=0)
    assert result.rank == 2
    assert result.per_rank[0].attempts == 100
    assert result.per_rank[0].best_residual >= 0.1


@pytest.mark.acceptance
def test_alignment_holds_on_every_channel_draw():
    from stiefel_tim.enums import AcceptanceRule
    from stiefel_tim.experiments import random_topology, sample_channels, verify_alignment
    from stiefel_tim.rank_search import extract_beamformers, minimize_rank

    for seed in range(10):
        inst = random_topology(5, 0.4, 0.5, seed=seed)
        result = minimize_rank(inst, restarts=5, seed=seed, acceptance=AcceptanceRule.COST, cost_eps=1e-14)
        bf = extract_beamformers(result.X, inst, result.rank)
        passed = sum(verify_alignment(inst, sample_channels(inst, seed=draw), bf) for draw in range(500))
        assert passed == 500


@pytest.mark.acceptance
def test_rtr_converges_faster_than_rcg():
    from stiefel_tim.enums import SolverName
    from stiefel_tim.experiments import compare_convergence, random_topology
    from stiefel_tim.models.options import SolverOptions
    from stiefel_tim.rank_search import minimize_rank

    inst = random_topology(10, 0.3, 0.5, d=2, seed=11)
    rank = minimize_rank(inst, restarts=3, seed=0).rank
    opts = SolverOptions(max_iters=5000, cost_floor=0.0)

    def residual(report):
        return np.sqrt(2.0 * report.objective_trace[-1] / inst.m)

    both, rcg_slower = 0, 0
    for seed in range(20):
        reports = compare_convergence(inst, rank, [SolverName.RTR, SolverName.RCG], seed, opts)
        rtr, rcg = reports[SolverName.RTR], reports[SolverName.RCG]
        if residual(rtr) >= 1e-3:
            continue
        assert rtr.grad_norm_trace[-1] < 1e-8
        tail = [g for g, prev in zip(rtr.grad_norm_trace[1:], rtr.grad_norm_trace, strict=False) if g < prev][-4:]
        ratios = [b / a for a, b in zip(tail, tail[1:], strict=False)]
        assert ratios[-1] < ratios[0]
        if residual(rcg) < 1e-3:
            both += 1
            rcg_slower += rcg.iterations > rtr.iterations
    assert both >= 5
    assert rcg_slower >= 0.7 * both


@pytest.mark.acceptance
def test_solver_ordering_over_connectivity():
    from stiefel_tim.enums import SolverName
    from stiefel_tim.experiments import run_sweep

    values = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
    solvers = ["rtr", "rcg", "altmin"]
    result = run_sweep(_sweep_config(K=10, values=values, trials=50, q=1.0, restarts=3, solvers=solvers))
    dof = _dof(result)
    for value in values:
        rtr, rcg, altmin = (dof[value, SolverName(name)] for name in solvers)
        assert _at_least(rtr, rcg)
        assert _at_least(rcg, altmin)


@pytest.mark.acceptance
def test_control_points_for_every_solver():
    from stiefel_tim.experiments import run_sweep

    solvers = ["rtr", "rcg", "altmin"]
    sparse = run_sweep(_sweep_config(K=10, values=[0.0], trials=3, q=1.0, solvers=solvers))
    dense = run_sweep(_sweep_config(K=10, variable="q", values=[0.0], trials=3, p=1.0, solvers=solvers))
    assert all(row.metrics["dof"].mean == pytest.approx(1.0) for row in sparse.summary)
    assert all(row.metrics["dof"].mean == pytest.approx(0.1) for row in dense.summary)


@pytest.mark.acceptance
def test_dof_grows_with_cooperation():
    from stiefel_tim.enums import SolverName
    from stiefel_tim.experiments import run_sweep

    values = [0.0, 0.25, 0.5, 0.75, 1.0]
    result = run_sweep(_sweep_config(K=10, variable="q", values=values, trials=50, p=0.2, restarts=3))
    means = [_dof(result)[value, SolverName.RTR] for value in values]
    assert all(_at_least(b, a) for a, b in zip(means, means[1:], strict=False))
    gain = means[-1].mean - means[0].mean
    assert gain > 2.0 * np.hypot(means[-1].stderr or 0.0, means[0].stderr or 0.0)
    assert gain > 0


@pytest.mark.acceptance
def test_leakage_collapses_along_converged_run(three_user_instance):
    from stiefel_tim.experiments import leakage_trace, sample_channels

    channels = sample_channels(three_user_instance, seed=0)
    converged = 0
    for seed in range(5):
        trace = leakage_trace(three_user_instance, channels, 2, seed=seed)
        if trace[-1][0] >= 1e-16:
            continue
        converged += 1
        assert trace[-1][1] <= 1e-6 * trace[0][1]
    assert converged > 0


@pytest.mark.acceptance
def test_pathloss_sum_rate_grows_with_power():
    from stiefel_tim.experiments import run_sweep

    powers = [1e-3, 1e-2, 1e-1, 1.0, 10.0]
    cfg = _sweep_config(K=10, variable="P", values=powers, trials=10, p=0.2, channel_model="pathloss_rayleigh")
    rates = [row.metrics["sum_rate"].mean for row in run_sweep(cfg).summary]
    assert all(b >= a for a, b in zip(rates, rates[1:], strict=False))
