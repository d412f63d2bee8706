"""Seeded random draws.

Every random quantity in the package flows from a ``numpy.random.Generator`` built
from an integer seed; nested seeds come from ``child_seed`` so results never depend
on scheduling or worker count.
"""

from typing import Any

import numpy as np
import numpy.typing as npt


def child_seed(seed: int, *indices: int) -> int:
    """Derive an independent integer seed from a base seed and an index path."""
    return int(np.random.SeedSequence([seed, *indices]).generate_state(1)[0])


def generator(seed: int) -> np.random.Generator:
    """Create a generator for an integer seed."""
    return np.random.default_rng(seed)


def complex_gaussian(rng: np.random.Generator, shape: tuple[int, ...]) -> npt.NDArray[np.complex128]:
    """Draw i.i.d. standard complex Gaussian entries (real and imaginary parts each N(0, 1/2)).

    Args:
        rng: Source of randomness
        shape: Output shape

    Returns:
        Complex array with E|z|² = 1
    """
    scale = np.sqrt(0.5)
    out: npt.NDArray[Any] = scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    return out.astype(np.complex128, copy=False)
