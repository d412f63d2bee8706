"""Pydantic models for instances, options, reports and results."""

from .base import ArrayModel, ComplexArray, FrozenModel, RealArray
from .channel import ChannelRealization
from .common import Count, PositiveReal, Probability, UnitInterval, validate_probability
from .network import NetworkInstance, NetworkInstanceFile
from .options import ArmijoOptions, SolverOptions, TcgOptions, TrustRegionOptions
from .report import SolverReport
from .results import BeamformerSet, RankAttempt, RankSearchResult
from .sweep import MetricSummary, SweepConfig, SweepResult, SweepRow, SweepSummaryRow


__all__ = [
    "ArmijoOptions",
    "ArrayModel",
    "BeamformerSet",
    "ChannelRealization",
    "ComplexArray",
    "Count",
    "FrozenModel",
    "MetricSummary",
    "NetworkInstance",
    "NetworkInstanceFile",
    "PositiveReal",
    "Probability",
    "RankAttempt",
    "RankSearchResult",
    "RealArray",
    "SolverOptions",
    "SolverReport",
    "SweepConfig",
    "SweepResult",
    "SweepRow",
    "SweepSummaryRow",
    "TcgOptions",
    "TrustRegionOptions",
    "UnitInterval",
    "validate_probability",
]
