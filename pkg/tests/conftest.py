import numpy as np
import pytest
from hypothesis import settings

from sampobs import SystemSpec
from sampobs.oracle import ninth_root_system, worst_case_system
from sampobs.sysmodel import Eigenvalue

settings.register_profile("ci", max_examples=60, deadline=None)
settings.load_profile("ci")

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def ninth_root():
    return ninth_root_system()


@pytest.fixture(scope="session")
def cube_roots():
    return worst_case_system(3, 0.343)


@pytest.fixture
def opposite_pair():
    return SystemSpec.diagonal([Eigenvalue.real(0.5), Eigenvalue.real(-0.5)])


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
