import numpy as np
import pytest

from zenogate.fock import FockVector, Statistics


@pytest.fixture
def both_photons():
    return FockVector.basis_state(Statistics.BOSON, 1, 1)


def max_abs(a, b=0.0):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
