import pytest

from quinelab.enumerator import sweep
from quinelab.machine import MachineSpec

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def spec():
    return MachineSpec()


@pytest.fixture(scope="session")
def spec4():
    return MachineSpec(m=4)


@pytest.fixture(scope="session")
def map12(spec):
    return sweep(spec)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
