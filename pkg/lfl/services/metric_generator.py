"""
Metric Generator Service Module

Produces metric fields u = log h on a model grid:
- seeded band-limited Fourier metrics (SplitMix64 coefficients)
- evaluation of an arbitrary FourierParam (used by the optimizer)
- the analytic presets
"""

import itertools
import logging
from typing import List, Sequence, Tuple

import numpy as np

from lfl.exceptions import ConfigError
from lfl.models.foliation import FoliatedModel
from lfl.models.metric import FourierParam, MetricPreset
from lfl.services.forms import MetricField
from lfl.utils.splitmix import SplitMix64

logger = logging.getLogger(__name__)

Frequency = Tuple[int, ...]


def half_spectrum(dim: int, cutoff: int) -> List[Frequency]:
    """
    Nonzero frequencies with |k_a| <= K whose first nonzero entry is positive,
    in lexicographic order. Together with their negatives they cover every
    nonzero frequency exactly once.
    """
    half = []
    for k in itertools.product(range(-cutoff, cutoff + 1), repeat=dim):
        first = next((ka for ka in k if ka != 0), 0)
        if first > 0:
            half.append(k)
    return half


def check_bandwidth(model: FoliatedModel, cutoff: int) -> None:
    """Periodic axes need K <= size/4 so that products stay resolved."""
    if model.is_periodic:
        limit = min(model.shape) // 4
        if cutoff > limit:
            raise ConfigError(f"cutoff {cutoff} exceeds size/4 = {limit} on {model.describe()}")


def seeded_coefficients(seed: int, dim: int, cutoff: int) -> List[Tuple[float, float]]:
    """
    Half-spectrum coefficients drawn from one SplitMix64 stream seeded with
    ``seed``: real then imaginary part, uniform in [-1, 1), in lexicographic
    frequency order.
    """
    rng = SplitMix64(seed)
    return [(rng.next_symmetric(), rng.next_symmetric()) for _ in half_spectrum(dim, cutoff)]


def evaluate_fourier(model: FoliatedModel, param: FourierParam) -> np.ndarray:
    """
    Sample the Fourier family on the model grid.

    Each axis is mapped to [0, 1) by (x - a)/L, so patch metrics are the
    restriction of a periodic function to the closed box. The coefficient
    tensor is contracted one axis at a time.
    """
    K = param.cutoff
    dim = model.dim
    frequencies = half_spectrum(dim, K)
    coefficients = param.coefficients or []
    if len(coefficients) != len(frequencies):
        raise ConfigError(
            f"FourierParam has {len(coefficients)} coefficients, cutoff {K} in {dim} axes needs {len(frequencies)}"
        )

    C = np.zeros((2 * K + 1,) * dim, dtype=np.complex128)
    for k, (re, im) in zip(frequencies, coefficients):
        weight = 1.0 / (1.0 + float(np.dot(k, k))) ** param.smoothness
        c = complex(re, im) * weight
        C[tuple(ka + K for ka in k)] = c
        C[tuple(K - ka for ka in k)] = np.conj(c)

    modes = np.arange(-K, K + 1)
    result = C
    for axis in range(dim):
        a, b = model.bounds[axis]
        x = (model.coordinates(axis) - a) / (b - a)
        E = np.exp(2j * np.pi * np.outer(x, modes))
        result = np.moveaxis(np.tensordot(E, result, axes=([1], [axis])), 0, axis)
    return param.amplitude * np.real(result)


def seeded_fourier_metric(
    model: FoliatedModel,
    seed: int,
    cutoff: int,
    amplitude: float,
    smoothness: float = 2.0,
) -> MetricField:
    """
    Seeded band-limited metric; identical seeds give identical fields.

    Raises:
        ConfigError: if the cutoff exceeds size/4 on a periodic model
    """
    check_bandwidth(model, cutoff)
    param = FourierParam(
        cutoff=cutoff,
        smoothness=smoothness,
        amplitude=amplitude,
        coefficients=seeded_coefficients(seed, model.dim, cutoff),
    )
    logger.debug(f"Seeded metric seed={seed} K={cutoff} p={smoothness} amplitude={amplitude}")
    return MetricField(evaluate_fourier(model, param))


def preset_metric(model: FoliatedModel, name: MetricPreset, epsilon: float = 0.1) -> MetricField:
    """Analytic preset metric fields."""
    name = MetricPreset(name)
    if name is MetricPreset.ZERO:
        return MetricField(np.zeros(model.shape))
    coords = model.mesh()
    if name is MetricPreset.QUADRATIC:
        u = np.zeros(model.shape)
        for axis in range(2 * model.n):
            u = u - coords[axis] ** 2
        return MetricField(u)
    return MetricField(epsilon * np.cos(2.0 * np.pi * coords[0]))


def parameters_to_coefficients(theta: Sequence[float]) -> List[Tuple[float, float]]:
    """Flat real search vector -> half-spectrum (re, im) pairs."""
    theta = np.asarray(theta, dtype=np.float64)
    return [(float(theta[2 * i]), float(theta[2 * i + 1])) for i in range(theta.shape[0] // 2)]
