import pytest

from fdcalc.config import builtin_params

# lines collected by the acceptance suite, echoed in the terminal summary
CRITERIA_LINES = []


@pytest.fixture(scope="session")
def set1():
    return builtin_params("paramset1")


@pytest.fixture(scope="session")
def set2():
    return builtin_params("paramset2")


def pytest_terminal_summary(terminalreporter):
    if CRITERIA_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERIA_LINES:
            terminalreporter.write_line(line)
