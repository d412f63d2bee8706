import numpy as np


def test_child_seed_deterministic_and_distinct():
    from stiefel_tim.rng import child_seed

    assert child_seed(0, 1, 2) == child_seed(0, 1, 2)
    assert child_seed(0, 1, 2) != child_seed(0, 2, 1)
    assert child_seed(0, 1) != child_seed(1, 1)


def test_complex_gaussian_unit_variance():
    from stiefel_tim.rng import complex_gaussian, generator

    z = complex_gaussian(generator(3), (200, 200))
    assert z.dtype == np.complex128
    assert abs(np.mean(np.abs(z) ** 2) - 1.0) < 0.02
