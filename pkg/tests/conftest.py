import functools

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20241016)


def embed(op, register, registers, N):
    """Full-space matrix of ``op`` on one register, built by an explicit Kronecker chain."""
    factors = [np.eye(N)] * registers
    factors[register] = op
    return functools.reduce(np.kron, factors)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
