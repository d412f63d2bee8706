"""Tests for sweep configuration and rows."""

import json

import pytest
from pydantic import ValidationError


def test_point_by_variable():
    from stiefel_tim.models.sweep import SweepConfig

    assert SweepConfig(K=4, variable="p", values=[0.5], q=0.2).point(0.5) == (0.5, 0.2, 1.0)
    assert SweepConfig(K=4, variable="q", values=[0.5], p=0.3).point(0.5) == (0.3, 0.5, 1.0)
    assert SweepConfig(K=4, variable="P", values=[10.0]).point(10.0) == (0.3, 1.0, 10.0)


def test_probability_grid_validated():
    from stiefel_tim.models.sweep import SweepConfig

    with pytest.raises(ValidationError, match=r"\[0, 1\]"):
        SweepConfig(K=4, variable="p", values=[0.5, 1.5])


def test_power_grid_must_be_positive():
    from stiefel_tim.models.sweep import SweepConfig

    with pytest.raises(ValidationError, match="positive"):
        SweepConfig(K=4, variable="P", values=[0.0])


def test_from_file_applies_overrides(tmp_path):
    from stiefel_tim.enums import SolverName
    from stiefel_tim.models.sweep import SweepConfig

    path = tmp_path / "sweep.json"
    path.write_text(json.dumps({"K": 4, "variable": "p", "values": [0.2], "seed": 3}))
    cfg = SweepConfig.from_file(path, seed=None, solvers=[SolverName.RCG])
    assert cfg.seed == 3
    assert cfg.solvers == [SolverName.RCG]


def test_from_file_defaults_fill_missing_keys(tmp_path):
    from stiefel_tim.models.sweep import SweepConfig

    path = tmp_path / "sweep.json"
    path.write_text(json.dumps({"K": 4, "variable": "p", "values": [0.2]}))
    assert SweepConfig.from_file(path, defaults={"seed": 17}).seed == 17
    assert SweepConfig.from_file(path, defaults={"seed": 17}, seed=2).seed == 2

    path.write_text(json.dumps({"K": 4, "variable": "p", "values": [0.2], "seed": 3}))
    assert SweepConfig.from_file(path, defaults={"seed": 17}).seed == 3


def test_from_file_rejects_non_object(tmp_path):
    from stiefel_tim.exceptions import InputError
    from stiefel_tim.models.sweep import SweepConfig

    path = tmp_path / "sweep.json"
    path.write_text("[1, 2]")
    with pytest.raises(InputError, match="JSON object"):
        SweepConfig.from_file(path)


def test_from_file_invalid_field(tmp_path):
    from stiefel_tim.exceptions import InputError
    from stiefel_tim.models.sweep import SweepConfig

    path = tmp_path / "sweep.json"
    path.write_text(json.dumps({"K": 0, "variable": "p", "values": [0.2]}))
    with pytest.raises(InputError, match="Invalid sweep config K"):
        SweepConfig.from_file(path)


def test_csv_cells_leave_failed_metrics_empty():
    from stiefel_tim.models.sweep import SweepRow

    row = SweepRow(sweep_var="q", value=0.5, solver="altmin", trial=2)
    assert row.failed
    assert row.csv_cells() == ["q", "0.5", "altmin", "2", "", "", "", "", "", "", ""]


def test_csv_cells_of_success():
    from stiefel_tim.models.sweep import SweepRow

    row = SweepRow(sweep_var="p", value=0.3, solver="rtr", trial=0, rank=2, dof=0.5, residual=1e-6, iters=12)
    cells = row.csv_cells()
    assert cells[:6] == ["p", "0.3", "rtr", "0", "2", "0.5"]
    assert cells[9] == "12"
