"""Pytest configuration and shared fixtures."""

import os

import pytest


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for key in list(os.environ.keys()):
        if key.startswith("STIEFEL_TIM_"):
            monkeypatch.delenv(key, raising=False)

    from stiefel_tim.config import get_settings

    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def propagate_logs():
    """Let caplog see records from the package logger, which does not propagate after setup."""
    from stiefel_tim.logging import logger

    previous = logger.propagate
    logger.propagate = True
    yield logger
    logger.propagate = previous


@pytest.fixture
def three_user_instance():
    """K=3 single-stream network: user 1 interferes with 2, transmitter 2 also holds message 3."""
    from stiefel_tim.models.network import NetworkInstance

    return NetworkInstance.build(
        K=3,
        d=1,
        edges=[(0, 0), (1, 1), (2, 2), (1, 0), (2, 1)],
        sharing=[[0], [1, 2], [2]],
    )


@pytest.fixture
def fully_connected_instance():
    """K=3 fully connected single-stream network without sharing."""
    from stiefel_tim.models.network import NetworkInstance

    return NetworkInstance.build(
        K=3,
        d=1,
        edges=[(k, j) for k in range(3) for j in range(3)],
        sharing=[[0], [1], [2]],
    )


@pytest.fixture
def full_sharing_pair():
    """K=2 fully connected network where both transmitters hold both messages."""
    from stiefel_tim.models.network import NetworkInstance

    return NetworkInstance.build(
        K=2,
        d=1,
        edges=[(0, 0), (0, 1), (1, 0), (1, 1)],
        sharing=[[0, 1], [0, 1]],
    )


@pytest.fixture
def scalar_instance():
    from stiefel_tim.models.network import NetworkInstance

    return NetworkInstance.build(K=1, d=1, edges=[(0, 0)], sharing=[[0]])


@pytest.fixture
def topology_file(tmp_path, three_user_instance):
    import json

    path = tmp_path / "net.json"
    path.write_text(json.dumps(three_user_instance.to_dict()))
    return path
