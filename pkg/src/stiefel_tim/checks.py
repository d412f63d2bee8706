"""Numerical self-checks of the geometry, the calculus and the oracles.

Each suite draws ``cases`` seeded random cases and reports the worst error as a
fraction of its tolerance; a suite passes when that ratio stays at or below 1.
"""

import logging
from collections.abc import Callable, Iterable

import numpy as np
from pydantic import BaseModel, ConfigDict

from .enums import AcceptanceRule, CheckSuite, SolverName
from .exceptions import StiefelTimError
from .experiments import random_topology, sample_channels, verify_alignment
from .linalg import ComplexMatrix, frobenius, skew_part, solve_skew_lyapunov
from .logging import log_event
from .manifold import FactorPoint, project_horizontal, random_horizontal, random_point
from .models.network import NetworkInstance
from .problem import AffineSystem, ProblemHandle, build_affine_system
from .rank_search import extract_beamformers, minimize_rank, nuclear_norm_analytic_optimum
from .rng import child_seed, complex_gaussian, generator


ProblemFactory = Callable[[AffineSystem, int], ProblemHandle]

FD_STEP = 1e-5
GRADIENT_RTOL = 1e-6
HESSIAN_SYMMETRY_RTOL = 1e-8
HESSIAN_FD_STEPS = (1e-3, 1e-4, 1e-5)
LYAPUNOV_RTOL = 1e-10
SKEW_RTOL = 1e-12
PROJECTION_RTOL = 1e-10
ALIGNMENT_INSTANCE_K = 3
ALIGNMENT_COST_EPS = 1e-14

_PROBABILITIES = (0.2, 0.5, 0.8)


class CheckResult(BaseModel):
    """Outcome of one suite."""

    model_config = ConfigDict(extra="forbid")

    suite: CheckSuite
    passed: bool
    cases: int
    failures: int
    worst_ratio: float
    detail: str = ""

    def line(self) -> str:
        """``PASS|FAIL <suite> <detail>``."""
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status} {self.suite.value} {self.cases - self.failures}/{self.cases} cases, "
            f"worst {self.worst_ratio:.2e} of tolerance{' ' + self.detail if self.detail else ''}"
        )


class _Tally:
    def __init__(self, suite: CheckSuite) -> None:
        self.suite = suite
        self.cases = 0
        self.failures = 0
        self.worst = 0.0
        self.detail = ""

    def add(self, error: float, tolerance: float) -> None:
        self.cases += 1
        ratio = float(error / tolerance) if tolerance > 0 else (0.0 if error == 0 else np.inf)
        if not ratio <= 1.0:
            self.failures += 1
        self.worst = max(self.worst, ratio)

    def fail(self, detail: str) -> None:
        self.cases += 1
        self.failures += 1
        self.worst = np.inf
        self.detail = detail

    def result(self) -> CheckResult:
        return CheckResult(
            suite=self.suite,
            passed=self.failures == 0 and self.cases > 0,
            cases=self.cases,
            failures=self.failures,
            worst_ratio=self.worst,
            detail=self.detail,
        )


def random_hpd(rng: np.random.Generator, r: int) -> ComplexMatrix:
    """Hermitian positive-definite r×r matrix AAᴴ + I."""
    A = complex_gaussian(rng, (r, r))
    return A @ A.conj().T + np.eye(r)


def random_skew(rng: np.random.Generator, r: int) -> ComplexMatrix:
    """Skew-Hermitian r×r matrix."""
    return skew_part(complex_gaussian(rng, (r, r)))


def random_unitary(rng: np.random.Generator, r: int) -> ComplexMatrix:
    """Unitary r×r matrix from the QR factorization of a Gaussian draw."""
    Q, R = np.linalg.qr(complex_gaussian(rng, (r, r)))
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def _random_case(seed: int, problem_factory: ProblemFactory) -> tuple[NetworkInstance, ProblemHandle, FactorPoint]:
    rng = generator(seed)
    K = int(rng.integers(2, 5))
    d = int(rng.integers(1, 3))
    inst = random_topology(K, float(rng.choice(_PROBABILITIES)), float(rng.choice(_PROBABILITIES)), d, seed)
    r = int(rng.integers(1, min(4, inst.N) + 1))
    problem = problem_factory(build_affine_system(inst), r)
    return inst, problem, random_point(inst.N, r, child_seed(seed, 1))


def check_lyapunov(seed: int, cases: int) -> CheckResult:
    """Residual and skew-Hermitian structure of the Lyapunov solver, orders 1..8."""
    tally = _Tally(CheckSuite.LYAPUNOV)
    for c in range(cases):
        rng = generator(child_seed(seed, c))
        r = int(rng.integers(1, 9))
        G, S = random_hpd(rng, r), random_skew(rng, r)
        omega = solve_skew_lyapunov(G, S)
        tally.add(frobenius(G @ omega + omega @ G - S), LYAPUNOV_RTOL * max(1.0, frobenius(S)))
        tally.add(frobenius(omega + omega.conj().T), SKEW_RTOL * max(1.0, frobenius(omega)))
    return tally.result()


def check_projection(seed: int, cases: int) -> CheckResult:
    """Idempotence, vertical annihilation and unitary equivariance of the projection."""
    tally = _Tally(CheckSuite.PROJECTION)
    for c in range(cases):
        case_seed = child_seed(seed, c)
        _, _, Y = _random_case(case_seed, ProblemHandle)
        rng = generator(child_seed(case_seed, 2))
        v = complex_gaussian(rng, Y.shape)
        h = project_horizontal(Y, v)
        scale = max(1.0, frobenius(v))
        tally.add(frobenius(project_horizontal(Y, h.matrix).matrix - h.matrix), PROJECTION_RTOL * scale)

        vertical = Y.matrix @ random_skew(rng, Y.rank)
        tally.add(frobenius(project_horizontal(Y, vertical).matrix), PROJECTION_RTOL * max(1.0, frobenius(vertical)))

        Q = random_unitary(rng, Y.rank)
        rotated = project_horizontal(FactorPoint(Y.matrix @ Q), v @ Q).matrix
        tally.add(frobenius(rotated - h.matrix @ Q), PROJECTION_RTOL * scale)
    return tally.result()


def check_gradient(seed: int, cases: int, problem_factory: ProblemFactory = ProblemHandle) -> CheckResult:
    """Riemannian gradient against central differences of the cost along horizontal directions."""
    tally = _Tally(CheckSuite.GRADIENT)
    for c in range(cases):
        case_seed = child_seed(seed, c)
        _, problem, Y = _random_case(case_seed, problem_factory)
        try:
            grad = problem.riemannian_gradient(Y)
        except StiefelTimError as e:
            tally.fail(str(e))
            continue
        xi = random_horizontal(Y, child_seed(case_seed, 3))
        f_plus = problem.cost(FactorPoint(Y.matrix + FD_STEP * xi.matrix, check=False))
        f_minus = problem.cost(FactorPoint(Y.matrix - FD_STEP * xi.matrix, check=False))
        fd = (f_plus - f_minus) / (2 * FD_STEP)
        tally.add(abs(fd - grad.inner(xi)), GRADIENT_RTOL * max(grad.norm(), 1e-12))
    return tally.result()


def check_hessian(seed: int, cases: int, problem_factory: ProblemFactory = ProblemHandle) -> CheckResult:
    """Hessian self-adjointness and first-order decay of finite-differenced gradients."""
    tally = _Tally(CheckSuite.HESSIAN)
    for c in range(cases):
        case_seed = child_seed(seed, c)
        _, problem, Y = _random_case(case_seed, problem_factory)
        xi = random_horizontal(Y, child_seed(case_seed, 3))
        zeta = random_horizontal(Y, child_seed(case_seed, 4))
        H_xi = problem.riemannian_hessian(Y, xi)
        H_zeta = problem.riemannian_hessian(Y, zeta)
        asymmetry = abs(H_xi.inner(zeta) - xi.inner(H_zeta))
        tally.add(asymmetry, HESSIAN_SYMMETRY_RTOL * max(1.0, H_xi.norm(), H_zeta.norm()))

        grad = problem.euclidean_gradient(Y)
        errors = []
        for t in HESSIAN_FD_STEPS:
            moved = problem.euclidean_gradient(FactorPoint(Y.matrix + t * xi.matrix, check=False))
            quotient = project_horizontal(Y, moved).matrix - project_horizontal(Y, grad).matrix
            errors.append(frobenius(quotient / t - H_xi.matrix))
        # error must shrink at least 10x over two decades of t
        tally.add(errors[-1], 0.1 * errors[0] + 1e-8 * max(1.0, H_xi.norm()))
    return tally.result()


def check_nuclear_norm(seed: int, cases: int) -> CheckResult:
    """Analytic nuclear-norm optimum is feasible and full rank on random single-stream instances."""
    tally = _Tally(CheckSuite.NUCLEAR_NORM)
    for c in range(cases):
        rng = generator(child_seed(seed, c))
        K = int(rng.integers(2, 7))
        p, q = float(rng.choice(_PROBABILITIES)), float(rng.choice(_PROBABILITIES))
        inst = random_topology(K, p, q, 1, child_seed(seed, c, 1))
        system = build_affine_system(inst)
        try:
            X, full_rank = nuclear_norm_analytic_optimum(system, inst)
        except StiefelTimError as e:
            tally.fail(str(e))
            continue
        tally.add(frobenius(system.apply(X) - system.b), 1e-12)
        tally.add(0.0 if full_rank else np.inf, 1.0)
    return tally.result()


def check_alignment(seed: int, cases: int) -> CheckResult:
    """Beamformers of a solved instance align on every random generic channel draw."""
    tally = _Tally(CheckSuite.ALIGNMENT)
    inst = random_topology(ALIGNMENT_INSTANCE_K, 0.5, 0.5, 1, child_seed(seed, 0))
    try:
        result = minimize_rank(
            inst,
            SolverName.RTR,
            restarts=2,
            seed=child_seed(seed, 1),
            acceptance=AcceptanceRule.COST,
            cost_eps=ALIGNMENT_COST_EPS,
        )
        bf = extract_beamformers(result.X, inst, result.rank)
    except StiefelTimError as e:
        tally.fail(str(e))
        return tally.result()
    for c in range(cases):
        aligned = verify_alignment(inst, sample_channels(inst, seed=child_seed(seed, 2, c)), bf)
        tally.add(0.0 if aligned else np.inf, 1.0)
    return tally.result()


def run_checks(
    seed: int = 0,
    suites: Iterable[CheckSuite] | None = None,
    cases: int = 20,
    problem_factory: ProblemFactory = ProblemHandle,
) -> list[CheckResult]:
    """Run the selected suites (all by default) and log each outcome.

    Args:
        seed: Base seed
        suites: Suites to run
        cases: Random cases per suite
        problem_factory: Builds the problem handle under test

    Returns:
        One result per suite, in ``CheckSuite`` order
    """
    selected = set(suites) if suites is not None else set(CheckSuite)
    runners: dict[CheckSuite, Callable[[int], CheckResult]] = {
        CheckSuite.LYAPUNOV: lambda s: check_lyapunov(s, cases),
        CheckSuite.PROJECTION: lambda s: check_projection(s, cases),
        CheckSuite.GRADIENT: lambda s: check_gradient(s, cases, problem_factory),
        CheckSuite.HESSIAN: lambda s: check_hessian(s, cases, problem_factory),
        CheckSuite.NUCLEAR_NORM: lambda s: check_nuclear_norm(s, cases),
        CheckSuite.ALIGNMENT: lambda s: check_alignment(s, cases),
    }
    results: list[CheckResult] = []
    for index, suite in enumerate(CheckSuite):
        if suite not in selected:
            continue
        result = runners[suite](child_seed(seed, index))
        log_event(
            logging.INFO if result.passed else logging.WARNING,
            "Check suite finished",
            "check_suite",
            suite=suite.value,
            passed=result.passed,
            cases=result.cases,
            failures=result.failures,
            worst_ratio=result.worst_ratio,
        )
        results.append(result)
    return results
