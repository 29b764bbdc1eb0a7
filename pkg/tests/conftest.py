"""Shared fixtures: Brownian path banks are expensive, build them once."""

import pytest

from gaugelab.stochastic import brownian_path

ACCEPTANCE_SEED = 20260818


@pytest.fixture(scope="session")
def paths_1000_L14():
    """1000 independent paths on [0, 1] at level 14, ids 1..1000."""
    return tuple(
        brownian_path(ACCEPTANCE_SEED, pid, 1.0, 14) for pid in range(1, 1001)
    )


@pytest.fixture(scope="session")
def paths_200_L14(paths_1000_L14):
    """First 200 of the bank; enough for median residual statistics."""
    return paths_1000_L14[:200]
