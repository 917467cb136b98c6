import numpy as np
import pytest

from cpfinetti.weight_basis import SuperpositionProfile

ACCEPTANCE_LINES = []


def even_cat(gamma=1.0):
    return SuperpositionProfile(((gamma, 1.0), (-gamma, 1.0)))


def product(beta):
    return SuperpositionProfile(((beta, 1.0),))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
