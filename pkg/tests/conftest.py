import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bayesel import SQUARE_DATA, constrained_logistic_model, fertility_intercept, mean_model, synthetic_fertility_data

# synthetic stand-in for the fertility survey (see README)
FERTILITY_BETA1 = 2.5
FERTILITY_XRATE = 0.5
FERTILITY_SEED = 2026


@pytest.fixture
def square():
    return SQUARE_DATA.copy()


@pytest.fixture
def mean2():
    return mean_model(2)


@pytest.fixture
def logistic():
    return constrained_logistic_model()


@pytest.fixture(scope="session")
def fertility_data():
    b0 = fertility_intercept(FERTILITY_BETA1, FERTILITY_XRATE)
    return synthetic_fertility_data(1000, [b0, FERTILITY_BETA1], FERTILITY_XRATE, seed=FERTILITY_SEED)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
