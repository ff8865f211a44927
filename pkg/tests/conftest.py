import math

import numpy as np
import pytest
from scipy import stats as sps

from exactsde.rng import RandomSource


class FixedSource:
    """RandomSource stand-in replaying given variates; runs dry loudly."""

    def __init__(self, uniform=(), normal=(), exponential=()):
        self._u = list(uniform)
        self._n = list(normal)
        self._e = list(exponential)

    def uniform(self):
        return self._u.pop(0)

    def normal(self):
        return self._n.pop(0)

    def exponential(self):
        return self._e.pop(0)


@pytest.fixture
def rng():
    return RandomSource(20241015)


def normal_cdf(mean, var):
    sd = math.sqrt(var)
    return lambda x: sps.norm.cdf(x, loc=mean, scale=sd)


def se_of_mean(p, n):
    return math.sqrt(p * (1 - p) / n)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
