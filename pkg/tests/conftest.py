import pytest

from singsub import register_example

# one line per acceptance criterion, filled in by test_acceptance.py
CRITERIA_LINES: list[str] = []


@pytest.fixture(scope="session")
def example2_lf():
    return register_example(2, "linearize-first")


@pytest.fixture(scope="session")
def example2_classical():
    return register_example(2, "classical")


@pytest.fixture(scope="session")
def example1_lf():
    return register_example(1, "linearize-first")


@pytest.fixture(scope="session")
def example1_classical():
    return register_example(1, "classical")


def pytest_terminal_summary(terminalreporter):
    if CRITERIA_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERIA_LINES:
            terminalreporter.write_line(line)
