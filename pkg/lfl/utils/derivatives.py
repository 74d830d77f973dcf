"""
Low-level one-dimensional derivative kernels.

Spectral differentiation on periodic axes (uniform grid, FFT), second-order
finite differences on non-periodic axes. Both act along one axis of an
n-dimensional real array; complex fields are split by the caller.
"""

import numpy as np


def spectral_derivative(f: np.ndarray, axis: int, length: float) -> np.ndarray:
    """
    Derivative of a real periodic sample along ``axis``.

    The domain along ``axis`` has period ``length`` and ``f.shape[axis]``
    equispaced points. On even grids the Nyquist mode of the derivative is
    zeroed so that the result stays real and band-limited.
    """
    N = f.shape[axis]
    F = np.fft.rfft(f, axis=axis)
    k = np.fft.rfftfreq(N, d=1.0 / N)
    multiplier = 2j * np.pi * k / length
    if N % 2 == 0:
        multiplier[-1] = 0.0
    dims = [1] * f.ndim
    dims[axis] = multiplier.shape[0]
    return np.fft.irfft(F * multiplier.reshape(dims), n=N, axis=axis)


def finite_difference(f: np.ndarray, axis: int, spacing: float) -> np.ndarray:
    """
    Second-order derivative stencil along ``axis``.

    Central differences inside, one-sided second-order stencils at both ends;
    exact on polynomials of degree at most two.
    """
    return np.gradient(f, spacing, axis=axis, edge_order=2)
