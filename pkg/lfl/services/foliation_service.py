"""
Foliation Service Module

Differential operators on the grid of a foliated model:
- coordinate partial derivatives (spectral on tori, finite differences on patches)
- leafwise Wirtinger derivatives with the shear correction of the sheared torus
- return maps of leaves to a transversal (holonomy of the linear foliation)
"""

import logging
from typing import Tuple

import numpy as np

from lfl.exceptions import GridMismatchError, ModelMismatchError, NumericalError
from lfl.models.foliation import FoliatedModel, ModelKind
from lfl.utils.derivatives import finite_difference, spectral_derivative

logger = logging.getLogger(__name__)


def ensure_on_grid(model: FoliatedModel, f: np.ndarray) -> None:
    """Raise GridMismatchError unless ``f`` is sampled on the model grid."""
    if tuple(np.shape(f)) != model.shape:
        raise GridMismatchError(f"field of shape {np.shape(f)} does not match grid {model.shape}")


def ensure_finite(f: np.ndarray, what: str) -> np.ndarray:
    """NaN/Inf guard applied after every derivative pass."""
    if not np.all(np.isfinite(f)):
        raise NumericalError(f"non-finite values in {what}")
    return f


def _real_partial(model: FoliatedModel, f: np.ndarray, axis: int) -> np.ndarray:
    if model.is_periodic:
        return spectral_derivative(f, axis, model.lengths()[axis])
    return finite_difference(f, axis, model.spacings()[axis])


def partial_derivative(model: FoliatedModel, f: np.ndarray, axis: int) -> np.ndarray:
    """
    Coordinate derivative of a sampled field along ``axis``.

    Real and imaginary parts are differentiated separately, so differentiation
    commutes exactly with complex conjugation.

    Args:
        model: the foliated model
        f: real or complex field on the model grid
        axis: coordinate axis in (x_1, y_1, ..., x_n, y_n, t) order

    Returns:
        np.ndarray: the derivative, real for real input

    Raises:
        GridMismatchError: if ``f`` is not on the model grid
        NumericalError: if the result contains NaN or Inf
    """
    ensure_on_grid(model, f)
    if not 0 <= axis < model.dim:
        raise GridMismatchError(f"axis {axis} out of range for a {model.dim}-dimensional model")
    f = np.asarray(f)
    if np.iscomplexobj(f):
        out = _real_partial(model, f.real, axis) + 1j * _real_partial(model, f.imag, axis)
    else:
        out = _real_partial(model, f.astype(np.float64, copy=False), axis)
    return ensure_finite(out, f"d/d{model.axis_names()[axis]}")


def wirtinger(model: FoliatedModel, f: np.ndarray, j: int, conjugate: bool = False) -> np.ndarray:
    """
    Leafwise Wirtinger derivative d/dz^j (or d/dzbar^j when ``conjugate``).

    d/dz^j = 1/2 (d/dx_j - i (d/dy_j + lambda_j d/dt)); the shear term makes the
    operator tangent to the leaves tau = t - lambda . y = const.

    Args:
        model: the foliated model
        f: real or complex field on the model grid
        j: 1-based leaf coordinate index
        conjugate: take d/dzbar^j instead

    Raises:
        GridMismatchError: if ``j`` is out of range or ``f`` is off-grid
    """
    if not 1 <= j <= model.n:
        raise GridMismatchError(f"leaf index {j} out of range 1..{model.n}")
    dx = partial_derivative(model, f, model.x_axis(j))
    leafwise_y = partial_derivative(model, f, model.y_axis(j))
    lam = model.shear[j - 1]
    if lam != 0.0:
        leafwise_y = leafwise_y + lam * partial_derivative(model, f, model.t_axis)
    if conjugate:
        return 0.5 * (dx + 1j * leafwise_y)
    return 0.5 * (dx - 1j * leafwise_y)


def sample_leaf_orbit(model: FoliatedModel, t0: float, returns: int, j: int = 1) -> np.ndarray:
    """
    Successive returns of a leaf of the sheared torus to the transversal {y_j = 0}.

    Following the leaf through (y_j, t) = (0, t0) once around the y_j circle
    shifts the transverse coordinate by lambda_j times the period, so the
    return map is the rotation t -> t + lambda_j L_y (mod L_t).

    Returns:
        np.ndarray: the first ``returns`` transverse coordinates, t0 included
    """
    if model.kind is not ModelKind.PERIODIC_SHEARED:
        raise ModelMismatchError("leaf orbits are only sampled on sheared tori")
    if returns < 1:
        raise ValueError("returns must be positive")
    a_t, b_t = model.bounds[model.t_axis]
    L_t = b_t - a_t
    L_y = model.lengths()[model.y_axis(j)]
    step = model.shear[j - 1] * L_y
    k = np.arange(returns, dtype=np.float64)
    return a_t + np.mod(t0 - a_t + k * step, L_t)


def max_transverse_gap(model: FoliatedModel, orbit: np.ndarray) -> float:
    """
    Largest gap left on the transverse circle by the sampled orbit.

    Tends to zero for dense leaves; stays at least L_t / q on closed leaves
    of rational shear p/q.
    """
    a_t, b_t = model.bounds[model.t_axis]
    pts = np.sort(np.mod(orbit - a_t, b_t - a_t))
    gaps = np.diff(np.concatenate([pts, [pts[0] + (b_t - a_t)]]))
    return float(gaps.max())


def fixed_t_slice(model: FoliatedModel, f: np.ndarray, t_index: int = 0) -> Tuple[np.ndarray, ...]:
    """
    Plane of ``f`` over (x_1, y_1) at fixed t, with the other leaf coordinates
    at their middle index; returns (x, y, values).
    """
    ensure_on_grid(model, f)
    index = [s // 2 for s in model.shape]
    index[0] = slice(None)
    index[1] = slice(None)
    index[model.t_axis] = t_index
    return model.coordinates(0), model.coordinates(1), np.asarray(f)[tuple(index)]
