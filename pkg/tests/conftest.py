import numpy as np
import pytest

from boussinesq1d.fields import InitialData, discretize, find_xn
from boussinesq1d.solver import StepControl, advance


def blowup_labels(rho0, n_max=8):
    return tuple(find_xn(rho0, n) for n in range(1, n_max + 1)) + (0.5,)


@pytest.fixture(scope="session")
def blowup_data():
    return InitialData.blowup(200.0)


@pytest.fixture(scope="session")
def blowup_run(blowup_data):
    """M = 200, N = 4000, uniform labels plus x_1..x_8 and 1/2, run to t = 1 or the flag."""
    labels = blowup_labels(blowup_data.rho0)
    state = discretize(blowup_data, 4000, extra_labels=labels)
    return advance(state, StepControl(t_end=1.0), rho0=blowup_data.rho0, tracked=labels)


@pytest.fixture(scope="session")
def m10_data():
    return InitialData.blowup(10.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    from helpers import ACCEPTANCE_LINES

    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
