import logging

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ez_avoid.geometry import EngagementZone
from ez_avoid.problem import ScenarioSpec
from ez_avoid.scenarios import solve_scenario_b

settings.register_profile("ci", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ci")


@pytest.fixture(scope="session")
def ez():
    return EngagementZone(2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def default_b():
    """Scenario B on the default instance, solved once per session."""
    return solve_scenario_b(ScenarioSpec("B"))


@pytest.fixture(autouse=True)
def _restore_package_log_level():
    # the CLI sets the package logger level; keep that from leaking across tests
    logger = logging.getLogger("ez_avoid")
    level = logger.level
    yield
    logger.setLevel(level)
