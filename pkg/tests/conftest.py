import functools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@functools.lru_cache(maxsize=None)
def _triangle(t):
    from hilbertkit.dynamics import build_triangle_reflection_group
    return build_triangle_reflection_group(3, 3, 4, t=t, L0=10)


@pytest.fixture(scope="session")
def triangle():
    return _triangle(2.0)


@pytest.fixture(scope="session")
def triangle_t1():
    return _triangle(1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(0)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import LINES
    except ImportError:
        return
    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
