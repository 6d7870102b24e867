import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from tpoisson import zassenhaus as zs

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def z51():
    return zs.build_zassenhaus(5, 1)


@pytest.fixture(scope="session")
def z71():
    return zs.build_zassenhaus(7, 1)


@pytest.fixture(scope="session")
def z31():
    return zs.build_zassenhaus(3, 1)


@pytest.fixture(scope="session")
def z52():
    return zs.build_zassenhaus(5, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
