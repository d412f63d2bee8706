"""Degrees-of-freedom maximization for topological transmitter cooperation.

Solves the generalized low-rank problem behind topological interference management
with message sharing by Riemannian optimization on the complex non-compact Stiefel
quotient manifold.
"""

from importlib.metadata import PackageNotFoundError, version

from stiefel_tim import constants
from stiefel_tim.enums import AcceptanceRule, SolverName


try:
    __version__ = version("stiefel-tim")
except PackageNotFoundError:
    __version__ = "0.1.0"

__all__ = [
    "AcceptanceRule",
    "SolverName",
    "__version__",
    "constants",
    "main",
]


def main() -> None:
    """Run the command-line interface.

        stiefel-tim solve --topology net.json --solver rtr --out results/
        stiefel-tim sweep --config sweep.json --jobs 8 --out sweep/
        stiefel-tim check
        stiefel-tim bench --topology net.json --rank 3

    Environment variables (CLI flags override them):
        STIEFEL_TIM_SEED: Base seed (default: 0)
        STIEFEL_TIM_JOBS: Sweep worker processes (default: all cores)
        STIEFEL_TIM_LOG_LEVEL / STIEFEL_TIM_LOG_FORMAT: Logging to stderr
    """
    from .cli import main as cli_main  # noqa: PLC0415

    cli_main()
