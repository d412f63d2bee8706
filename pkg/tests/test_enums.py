def test_solver_names():
    from stiefel_tim.enums import SolverName

    assert [s.value for s in SolverName] == ["rtr", "rcg", "altmin"]


def test_enums_are_strings():
    from stiefel_tim.enums import AcceptanceRule, ChannelModel, SolverStatus

    assert AcceptanceRule.RESIDUAL == "residual"
    assert ChannelModel.PATHLOSS_RAYLEIGH == "pathloss_rayleigh"
    assert SolverStatus.CONVERGED_GRADIENT == "converged-gradient"


def test_sweep_variable_power_is_uppercase():
    from stiefel_tim.enums import SweepVariable

    assert SweepVariable("P") is SweepVariable.POWER
    assert SweepVariable("p") is SweepVariable.P


def test_check_suites():
    from stiefel_tim.enums import CheckSuite

    expected = {"lyapunov", "projection", "gradient", "hessian", "nuclear_norm", "alignment"}
    assert {s.value for s in CheckSuite} == expected


def test_tcg_stops():
    from stiefel_tim.enums import TcgStop

    assert TcgStop("negative_curvature") is TcgStop.NEGATIVE_CURVATURE
    assert len(TcgStop) == 7
