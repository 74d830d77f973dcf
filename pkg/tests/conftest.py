"""Shared models and metrics for the test suite."""

import math

import numpy as np
import pytest

from lfl.models.foliation import GridSpec, ModelKind, build_model
from lfl.services.forms import MetricField
from lfl.services.metric_generator import seeded_fourier_metric

GOLDEN_SHEAR = math.sqrt(2.0) - 1.0


def grid(size: int, n: int = 1) -> GridSpec:
    return GridSpec(sizes=(size,) * (2 * n + 1))


@pytest.fixture
def torus():
    return build_model(1, ModelKind.PERIODIC_PRODUCT, grid(32))


@pytest.fixture
def sheared_torus():
    return build_model(1, ModelKind.PERIODIC_SHEARED, grid(32), shear=[GOLDEN_SHEAR])


@pytest.fixture
def patch():
    return build_model(1, ModelKind.OPEN_PATCH, grid(21))


@pytest.fixture
def torus5():
    return build_model(2, ModelKind.PERIODIC_PRODUCT, grid(8, n=2))


@pytest.fixture
def small_torus():
    return build_model(1, ModelKind.PERIODIC_PRODUCT, grid(8))


@pytest.fixture
def seeded_metric():
    """Factory: seeded band-limited metric on a model."""

    def make(model, seed=0, cutoff=3, amplitude=0.1):
        return seeded_fourier_metric(model, seed, cutoff, amplitude)

    return make


@pytest.fixture
def zero_metric():
    def make(model):
        return MetricField(np.zeros(model.shape))

    return make
