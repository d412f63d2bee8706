"""Tests for models module exports."""

from stiefel_tim import models


def test_models_exported():
    for name in (
        "NetworkInstance",
        "SolverOptions",
        "SolverReport",
        "RankSearchResult",
        "BeamformerSet",
        "ChannelRealization",
        "SweepConfig",
        "SweepResult",
    ):
        assert hasattr(models, name)


def test_all_matches_attributes():
    for name in models.__all__:
        assert hasattr(models, name)
