import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from lielcs import catalog

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def scenarios():
    return {n: catalog.packaged_scenario(n) for n in catalog.packaged_scenario_names()}


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
