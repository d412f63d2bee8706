"""Enumeration types for stiefel-tim."""

from enum import Enum


class SolverName(str, Enum):
    """Fixed-rank solvers available to the rank search."""

    RTR = "rtr"
    RCG = "rcg"
    ALTMIN = "altmin"


class SolverStatus(str, Enum):
    """Terminal status of a single solver run."""

    CONVERGED_GRADIENT = "converged-gradient"
    CONVERGED_COST = "converged-cost"
    MAX_ITERS = "max-iters"
    STALLED = "stalled"


class BetaRule(str, Enum):
    """Conjugate direction update used by RCG.

    ``steepest`` forces β = 0, which turns RCG into Riemannian gradient descent.
    """

    HESTENES_STIEFEL = "hestenes_stiefel"
    STEEPEST = "steepest"


class TcgStop(str, Enum):
    """Reason the truncated CG inner loop stopped."""

    NEGATIVE_CURVATURE = "negative_curvature"
    EXCEEDED_TRUST_REGION = "exceeded_trust_region"
    REACHED_TARGET_LINEAR = "reached_target_linear"
    REACHED_TARGET_SUPERLINEAR = "reached_target_superlinear"
    MAX_INNER_ITERATIONS = "max_inner_iterations"
    MODEL_INCREASED = "model_increased"
    ZERO_GRADIENT = "zero_gradient"


class AcceptanceRule(str, Enum):
    """Criterion that accepts a rank in the rank search.

    ``residual`` uses m^{-1/2}·‖𝒜(X) − b‖ < tol, ``cost`` uses f(Y) < ε.
    """

    RESIDUAL = "residual"
    COST = "cost"


class ChannelModel(str, Enum):
    """Fading model used to draw channel coefficients."""

    GENERIC_GAUSSIAN = "generic_gaussian"
    PATHLOSS_RAYLEIGH = "pathloss_rayleigh"


class SweepVariable(str, Enum):
    """Parameter varied along a sweep grid."""

    P = "p"
    Q = "q"
    POWER = "P"


class CheckSuite(str, Enum):
    """Invariant suites run by ``stiefel-tim check``."""

    LYAPUNOV = "lyapunov"
    PROJECTION = "projection"
    GRADIENT = "gradient"
    HESSIAN = "hessian"
    NUCLEAR_NORM = "nuclear_norm"
    ALIGNMENT = "alignment"
