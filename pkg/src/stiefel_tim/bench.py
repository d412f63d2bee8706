"""Timing of the per-iteration ingredients at a fixed rank."""

import time
from collections.abc import Callable
from typing import Any

from pydantic import BaseModel, Field

from .manifold import project_horizontal, random_horizontal, random_point, retract
from .models.network import NetworkInstance
from .problem import ProblemHandle, build_affine_system
from .rng import child_seed, complex_gaussian, generator


INGREDIENTS = ("cost", "gradient", "hessian", "projection", "retraction")
RETRACTION_STEP = 1e-3


class IngredientTimings(BaseModel):
    """Mean seconds per call of each ingredient, with the problem dimensions."""

    m: int
    n: int
    N: int
    l: int  # noqa: E741
    rank: int
    repeats: int
    seconds: dict[str, float] = Field(description="Mean seconds per call, keyed by ingredient")


def _timed(call: Callable[[], Any]) -> float:  # noqa: ANN401
    start = time.perf_counter()
    call()
    return time.perf_counter() - start


def bench_ingredients(inst: NetworkInstance, rank: int, repeats: int = 10, seed: int = 0) -> IngredientTimings:
    """Time cost, gradient, Hessian-vector product, projection and retraction.

    The evaluation cache is cleared before every cost and gradient call so that
    each timing includes one application of the constraint operator and its adjoint.

    Args:
        inst: Network instance
        rank: Factor width r
        repeats: Timed calls per ingredient, each at a fresh random point
        seed: Base seed

    Returns:
        Mean timings

    Raises:
        ValueError: If repeats < 1
    """
    if repeats < 1:
        msg = "repeats must be ≥ 1"
        raise ValueError(msg)
    system = build_affine_system(inst)
    problem = ProblemHandle(system, rank)
    totals = dict.fromkeys(INGREDIENTS, 0.0)
    for rep in range(repeats):
        Y = random_point(system.N, rank, child_seed(seed, rep, 0))
        xi = random_horizontal(Y, child_seed(seed, rep, 1))
        v = complex_gaussian(generator(child_seed(seed, rep, 2)), Y.shape)

        problem.clear_cache()
        totals["cost"] += _timed(lambda Y=Y: problem.cost(Y))
        problem.clear_cache()
        totals["gradient"] += _timed(lambda Y=Y: problem.riemannian_gradient(Y))
        totals["hessian"] += _timed(lambda Y=Y, xi=xi: problem.riemannian_hessian(Y, xi))
        totals["projection"] += _timed(lambda Y=Y, v=v: project_horizontal(Y, v))
        totals["retraction"] += _timed(lambda Y=Y, xi=xi: retract(Y, xi, RETRACTION_STEP))

    return IngredientTimings(
        m=system.m,
        n=system.n,
        N=system.N,
        l=system.l,
        rank=rank,
        repeats=repeats,
        seconds={name: total / repeats for name, total in totals.items()},
    )
