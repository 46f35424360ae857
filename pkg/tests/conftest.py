import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from dualmink.geometry import DiscreteMeasure, Polytope, square

settings.register_profile("dualmink", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("dualmink")

SQ2 = np.sqrt(2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def sq():
    return square()


@pytest.fixture
def sq_redundant():
    V = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0], [1 / SQ2, 1 / SQ2]])
    return Polytope(V, [1.0, 1.0, 1.0, 1.0, 2.0])


@pytest.fixture
def square_measure():
    V = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
    return DiscreteMeasure(V, np.full(4, SQ2 / 2))


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
