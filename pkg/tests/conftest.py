import numpy as np
import pytest

from lmmreg.core import Responsibilities

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def hard(M, N=None):
    """Identity matching as a Responsibilities object."""
    N = M if N is None else N
    return Responsibilities(np.eye(M, N), np.zeros(N))


def rot(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])
