"""
Geometric Forms Service Module

Builds the leafwise connection form alpha_h, its curvature Theta_h and the
transverse form eta = h dtau from a metric field u = log h, and assembles the
bulk and boundary integrands

    bulk(c)     = (i Theta - c i alpha ^ conj(alpha))^n ^ eta
    boundary(c) = (i Theta - c i alpha ^ conj(alpha))^(n-1) ^ i alpha ^ eta

whose relation d(boundary) = bulk at c = 1/n drives the global estimate.

Conventions: dz^j = dx_j + i dy_j, so i dz ^ dzbar = 2 dx ^ dy; positivity of
a leafwise (1,1)-form means positive definiteness of its hermitian matrix.
"""

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from lfl.exceptions import FormConstructionError, GridMismatchError, NumericalError
from lfl.models.foliation import FoliatedModel
from lfl.services.exterior import (
    DifferentialForm,
    add,
    conj,
    coordinate_form,
    scale,
    wedge,
    wedge_power,
    zero_form,
)
from lfl.services.foliation_service import ensure_finite, ensure_on_grid, wirtinger

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MetricField:
    """
    u = log h_U on the model grid, h_U being the norm of d/dt.

    Positivity of h^2 is automatic; only finiteness of u is required.
    """

    u: np.ndarray

    def __post_init__(self):
        if np.iscomplexobj(self.u):
            raise GridMismatchError("the metric field u = log h must be real")
        if not np.all(np.isfinite(self.u)):
            raise NumericalError("metric field has non-finite values")

    @property
    def h(self) -> np.ndarray:
        return ensure_finite(np.exp(self.u), "h = e^u")


@dataclass(frozen=True)
class AlphaVectorField:
    """alpha_j = du/dz^j, stored with shape (n, *grid)."""

    values: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def squared_norm(self) -> np.ndarray:
        return np.sum(np.abs(self.values) ** 2, axis=0)


@dataclass(frozen=True)
class ThetaMatrixField:
    """Hermitian Theta_{j kbar} = -d^2 u / dz^j dzbar^k, stored with shape (n, n, *grid)."""

    values: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def trace(self) -> np.ndarray:
        return np.real(np.einsum("jj...->...", self.values))

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0

    def min_eigenvalue(self) -> np.ndarray:
        """
        Smallest eigenvalue per grid point.

        Closed forms: the scalar itself for n = 1, trace/determinant formula
        for the 2x2 hermitian case.
        """
        if self.n == 1:
            return np.real(self.values[0, 0])
        a = np.real(self.values[0, 0])
        d = np.real(self.values[1, 1])
        b = self.values[0, 1]
        return 0.5 * (a + d) - np.sqrt(0.25 * (a - d) ** 2 + np.abs(b) ** 2)

    def determinant(self) -> np.ndarray:
        if self.n == 1:
            return np.real(self.values[0, 0])
        return np.real(self.values[0, 0] * self.values[1, 1] - self.values[0, 1] * self.values[1, 0])


def _check_metric(model: FoliatedModel, m: MetricField) -> None:
    ensure_on_grid(model, m.u)


def alpha_vector(model: FoliatedModel, m: MetricField) -> AlphaVectorField:
    """alpha_j = du/dz^j with the shear-corrected leafwise Wirtinger operator."""
    _check_metric(model, m)
    return AlphaVectorField(np.stack([wirtinger(model, m.u, j) for j in range(1, model.n + 1)]))


def theta_matrix(model: FoliatedModel, m: MetricField) -> ThetaMatrixField:
    """
    Theta_{j kbar} = -d/dz^j (du/dzbar^k), symmetrized to be exactly hermitian.
    """
    _check_metric(model, m)
    n = model.n
    dbar = [wirtinger(model, m.u, k, conjugate=True) for k in range(1, n + 1)]
    raw = np.empty((n, n) + model.shape, dtype=np.complex128)
    for j in range(n):
        for k in range(n):
            raw[j, k] = -wirtinger(model, dbar[k], j + 1)
    hermitian = 0.5 * (raw + np.conj(np.swapaxes(raw, 0, 1)))
    return ThetaMatrixField(hermitian)


def dz_form(model: FoliatedModel, j: int) -> DifferentialForm:
    """dz^j = dx_j + i dy_j."""
    return add(coordinate_form(model, [model.x_axis(j)]), coordinate_form(model, [model.y_axis(j)], 1j))


def dzbar_form(model: FoliatedModel, j: int) -> DifferentialForm:
    return conj(dz_form(model, j))


def transverse_coframe(model: FoliatedModel) -> DifferentialForm:
    """dtau = dt - sum_j lambda_j dy_j."""
    form = coordinate_form(model, [model.t_axis])
    for j in range(1, model.n + 1):
        lam = model.shear[j - 1]
        if lam != 0.0:
            form = add(form, coordinate_form(model, [model.y_axis(j)], -lam))
    return form


def alpha_form(model: FoliatedModel, m: MetricField) -> DifferentialForm:
    """
    alpha_h = sum_j (du/dz^j) dz^j as an ambient 1-form.

    Raises:
        GridMismatchError: if the metric is not on the model grid
    """
    alpha = alpha_vector(model, m)
    form = zero_form(model, 1)
    for j in range(1, model.n + 1):
        form = add(form, scale(alpha.values[j - 1], dz_form(model, j)))
    return form


def theta_form(model: FoliatedModel, m: MetricField) -> Tuple[DifferentialForm, ThetaMatrixField]:
    """
    Theta_h = sum_{j,k} Theta_{j kbar} dz^j ^ dzbar^k, with its matrix field.
    """
    theta = theta_matrix(model, m)
    form = zero_form(model, 2)
    for j in range(1, model.n + 1):
        for k in range(1, model.n + 1):
            basis = wedge(dz_form(model, j), dzbar_form(model, k))
            form = add(form, scale(theta.values[j - 1, k - 1], basis))
    return form, theta


def eta_form(model: FoliatedModel, m: MetricField) -> DifferentialForm:
    """eta = h dtau = e^u (dt - lambda . dy)."""
    _check_metric(model, m)
    return scale(m.h, transverse_coframe(model))


def curvature_combination(model: FoliatedModel, m: MetricField, c: float) -> DifferentialForm:
    """i Theta - c i alpha ^ conj(alpha)."""
    if not math.isfinite(c):
        raise ValueError("the exponent parameter c must be finite")
    theta, _ = theta_form(model, m)
    alpha = alpha_form(model, m)
    return add(scale(1j, theta), scale(-1j * c, wedge(alpha, conj(alpha))))


def _check_real_top(model: FoliatedModel, form: DifferentialForm) -> None:
    top = tuple(range(model.dim))
    if top not in form.components:
        return
    values = form.components[top]
    real_norm = float(np.max(np.abs(values.real)))
    imag_norm = float(np.max(np.abs(values.imag)))
    if imag_norm > 1e-9 * real_norm + 1e-14:
        raise FormConstructionError(
            f"bulk form has imaginary part {imag_norm:.3e} against real part {real_norm:.3e}"
        )


def bulk_form(model: FoliatedModel, m: MetricField, c: float) -> DifferentialForm:
    """
    (i Theta - c i alpha ^ conj(alpha))^n ^ eta, a top-degree form.

    The proof of the global estimate takes c = 1/n; the exponent condition
    takes c = eta / (1 - eta).

    Raises:
        FormConstructionError: if the top component is not real to 1e-9 relative
    """
    if c < 0:
        raise ValueError("the exponent parameter c must be non-negative")
    curvature = curvature_combination(model, m, c)
    form = wedge(wedge_power(model, curvature, model.n), eta_form(model, m))
    _check_real_top(model, form)
    return form


def boundary_form(model: FoliatedModel, m: MetricField, c: float) -> DifferentialForm:
    """
    (i Theta - c i alpha ^ conj(alpha))^(n-1) ^ i alpha ^ eta, a 2n-form.

    For n = 1 the curvature power is the empty product, so this is i alpha ^ eta.
    """
    curvature = curvature_combination(model, m, c)
    i_alpha = scale(1j, alpha_form(model, m))
    return wedge(wedge(wedge_power(model, curvature, model.n - 1), i_alpha), eta_form(model, m))


def bulk_density_determinant(model: FoliatedModel, m: MetricField, c: float) -> np.ndarray:
    """
    Top coefficient of bulk(c) through the determinant shortcut.

    (iA)^n = n! det(A) prod_j (i dz^j ^ dzbar^j) and i dz ^ dzbar = 2 dx ^ dy,
    so the coefficient of dx_1 ^ dy_1 ^ ... ^ dt is 2^n n! det(Theta - c alpha alpha*) e^u.
    """
    theta = theta_matrix(model, m).values
    alpha = alpha_vector(model, m).values
    A = theta - c * np.einsum("j...,k...->jk...", alpha, np.conj(alpha))
    if model.n == 1:
        det = np.real(A[0, 0])
    else:
        det = np.real(A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0])
    return (2 ** model.n) * math.factorial(model.n) * det * m.h
