"""Shared fixtures and hypothesis profiles for the test-suite."""

import os

os.environ.setdefault("HADAMARD_ENV", "testing")

import hypothesis
import numpy as np
import pytest

from services.geometry.euclidean import EuclideanSpace
from services.geometry.open_book import BookSpace
from services.geometry.spd import SpdSpace

np.seterr(all="warn")

hypothesis.settings.register_profile("ci", max_examples=100, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.register_profile("debugger", report_multiple_bugs=False, deadline=None)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "ci"))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def euclid3():
    return EuclideanSpace(3)


@pytest.fixture
def spd2():
    return SpdSpace(2)


@pytest.fixture
def book31():
    return BookSpace(k=3, d=1)


@pytest.fixture
def commuting_family():
    """Factory of diagonal SPD matrices with log-normal diagonals."""
    def make(rng, n, dim=2, scale=1.0):
        return [np.diag(np.exp(scale * rng.normal(size=dim))) for _ in range(n)]
    return make
