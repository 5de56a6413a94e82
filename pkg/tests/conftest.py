import numpy as np
import pytest

from ballcontract.norms import NormBody, parse_norm

ACCEPTANCE_LINES: list[str] = []


def record_acceptance(line: str) -> None:
    """Collect one pass/fail line per acceptance criterion for the terminal summary."""
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def l1_2d():
    return parse_norm("l1", 2)


@pytest.fixture
def linf_2d():
    return parse_norm("linf", 2)


@pytest.fixture
def euclid_2d():
    return NormBody.euclidean(2)


@pytest.fixture
def grid3():
    return np.array([[i, j] for i in range(3) for j in range(3)], dtype=float)
