import numpy as np
import pytest


def test_factor_point_is_read_only():
    from stiefel_tim.manifold import random_point

    Y = random_point(6, 2, seed=1)
    with pytest.raises(ValueError):
        Y.matrix[0, 0] = 0


def test_factor_point_rejects_rank_deficient():
    from stiefel_tim.exceptions import RankDeficiencyError
    from stiefel_tim.manifold import FactorPoint

    with pytest.raises(RankDeficiencyError, match="full column rank"):
        FactorPoint(np.ones((4, 2)))


def test_factor_point_rejects_wide():
    from stiefel_tim.exceptions import DimensionError
    from stiefel_tim.manifold import FactorPoint

    with pytest.raises(DimensionError):
        FactorPoint(np.eye(2, 3))


def test_factor_point_key_tracks_entries():
    from stiefel_tim.manifold import FactorPoint, random_point

    Y = random_point(5, 2, seed=0)
    assert FactorPoint(Y.matrix).key == Y.key
    assert FactorPoint(2 * Y.matrix).key != Y.key


def test_split():
    from stiefel_tim.manifold import random_point

    Y = random_point(7, 2, seed=0)
    L, R = Y.split(3)
    assert L.shape == (3, 2)
    assert R.shape == (4, 2)


def test_random_point_deterministic():
    from stiefel_tim.manifold import random_point

    assert np.array_equal(random_point(8, 3, 5).matrix, random_point(8, 3, 5).matrix)


def test_random_point_rank_range():
    from stiefel_tim.exceptions import DimensionError
    from stiefel_tim.manifold import random_point

    with pytest.raises(DimensionError):
        random_point(3, 4, 0)
    with pytest.raises(DimensionError):
        random_point(3, 0, 0)


@pytest.mark.parametrize(("N", "r"), [(4, 1), (6, 3), (12, 4)])
def test_projection_is_horizontal_and_idempotent(N, r):
    from stiefel_tim.manifold import is_horizontal, project_horizontal, random_point
    from stiefel_tim.rng import complex_gaussian, generator

    Y = random_point(N, r, seed=N + r)
    v = complex_gaussian(generator(1), (N, r))
    h = project_horizontal(Y, v)

    assert is_horizontal(Y, h.matrix)
    assert np.linalg.norm(project_horizontal(Y, h.matrix).matrix - h.matrix) <= 1e-10 * np.linalg.norm(v)


def test_projection_annihilates_vertical():
    from stiefel_tim.checks import random_skew
    from stiefel_tim.manifold import project_horizontal, random_point
    from stiefel_tim.rng import generator

    Y = random_point(9, 3, seed=2)
    vertical = Y.matrix @ random_skew(generator(0), 3)
    assert np.linalg.norm(project_horizontal(Y, vertical).matrix) <= 1e-10 * np.linalg.norm(vertical)


def test_projection_is_orthogonal():
    from stiefel_tim.linalg import real_trace_metric
    from stiefel_tim.manifold import project_horizontal, random_point
    from stiefel_tim.rng import complex_gaussian, generator

    Y = random_point(8, 2, seed=3)
    v = complex_gaussian(generator(4), (8, 2))
    h = project_horizontal(Y, v).matrix
    assert abs(real_trace_metric(v - h, h)) <= 1e-10 * np.linalg.norm(v) ** 2


def test_projection_shape_mismatch():
    from stiefel_tim.exceptions import DimensionError
    from stiefel_tim.manifold import project_horizontal, random_point

    with pytest.raises(DimensionError):
        project_horizontal(random_point(5, 2, 0), np.zeros((5, 3)))


def test_retract_zero_step_returns_same_point():
    from stiefel_tim.manifold import random_horizontal, random_point, retract

    Y = random_point(6, 2, 0)
    assert retract(Y, random_horizontal(Y, 1), 0.0) is Y


def test_retract_adds_step():
    from stiefel_tim.manifold import random_horizontal, random_point, retract

    Y = random_point(6, 2, 0)
    xi = random_horizontal(Y, 1)
    assert np.allclose(retract(Y, xi, 0.5).matrix, Y.matrix + 0.5 * xi.matrix)


def test_retract_rank_loss_raises():
    from stiefel_tim.exceptions import RetractionError
    from stiefel_tim.manifold import FactorPoint, HorizontalVector, retract

    Y = FactorPoint(np.eye(3, 2))
    xi = HorizontalVector(-np.eye(3, 2) * np.array([1.0, 0.0]), Y)
    with pytest.raises(RetractionError) as exc_info:
        retract(Y, xi, 1.0)
    assert exc_info.value.step == 1.0


def test_random_horizontal_unit_norm():
    from stiefel_tim.manifold import is_horizontal, random_horizontal, random_point

    Y = random_point(7, 3, 0)
    xi = random_horizontal(Y, 2)
    assert xi.norm() == pytest.approx(1.0)
    assert is_horizontal(Y, xi.matrix)


def test_vector_arithmetic_checks_anchor():
    from stiefel_tim.exceptions import DimensionError
    from stiefel_tim.manifold import random_horizontal, random_point

    Y, Z = random_point(5, 2, 0), random_point(5, 2, 1)
    with pytest.raises(DimensionError, match="different points"):
        random_horizontal(Y, 0) + random_horizontal(Z, 0)


def test_vector_arithmetic():
    from stiefel_tim.manifold import random_horizontal, random_point

    Y = random_point(5, 2, 0)
    a, b = random_horizontal(Y, 0), random_horizontal(Y, 1)
    assert np.allclose((2 * a - b).matrix, 2 * a.matrix - b.matrix)
    assert np.allclose((a / 2).matrix, 0.5 * a.matrix)
    assert np.allclose((-a).matrix, -a.matrix)


def test_transport_projects_onto_target():
    from stiefel_tim.manifold import is_horizontal, random_horizontal, random_point, transport

    Y, Z = random_point(6, 2, 0), random_point(6, 2, 1)
    xi = random_horizontal(Y, 0)
    moved = transport(xi, Z)
    assert moved.anchor is Z
    assert is_horizontal(Z, moved.matrix)
    assert transport(xi, Y) is xi


def test_pad_point_keeps_columns():
    from stiefel_tim.manifold import pad_point, random_point

    Y = random_point(6, 2, 0)
    padded = pad_point(Y, seed=3)
    assert padded.shape == (6, 3)
    assert np.array_equal(padded.matrix[:, :2], Y.matrix)
    assert np.linalg.norm(padded.matrix[:, 2]) < 0.1 * np.linalg.norm(Y.matrix[:, 0])
