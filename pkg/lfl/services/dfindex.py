"""
Diederich-Fornaess Exponent Service Module

The exponent of a metric h^2 is the supremum of eta in (0, 1] with

    i Theta_h - eta / (1 - eta) i alpha_h ^ conj(alpha_h) > 0    on T^{1,0}.

With c = eta / (1 - eta) the matrix condition Theta - c alpha alpha* > 0
holds iff Theta > 0 and c s < 1 where s = alpha* Theta^-1 alpha (Schur
complement of a rank-one update), hence eta_h = 1 / (1 + max s).
"""

import logging
from typing import Optional, Tuple

import numpy as np

from lfl.config import settings
from lfl.exceptions import NotPositiveError
from lfl.models.foliation import FoliatedModel
from lfl.models.reports import ExponentReport
from lfl.services.forms import (
    AlphaVectorField,
    MetricField,
    ThetaMatrixField,
    alpha_vector,
    theta_matrix,
)

logger = logging.getLogger(__name__)

MEAN_TRACE_REASON = "mean trace Theta ~ 0: Theta cannot be positive everywhere on a compact model"


def positivity_threshold(theta: ThetaMatrixField) -> float:
    """Strict positivity cutoff: POSITIVITY_RTOL * (1 + |Theta|_inf)."""
    return settings.POSITIVITY_RTOL * (1.0 + theta.sup_norm())


def _unravel(model: FoliatedModel, flat_index: int) -> Tuple[int, ...]:
    return tuple(int(i) for i in np.unravel_index(flat_index, model.shape))


def schur_quantity(theta: ThetaMatrixField, alpha: AlphaVectorField) -> np.ndarray:
    """
    s = conj(alpha)^T Theta^-1 alpha per grid point, by the explicit inverse
    (n = 1: |alpha|^2 / Theta; n = 2: adjugate over determinant).
    """
    if theta.n == 1:
        return np.abs(alpha.values[0]) ** 2 / np.real(theta.values[0, 0])
    a = np.real(theta.values[0, 0])
    d = np.real(theta.values[1, 1])
    b = theta.values[0, 1]
    x, y = alpha.values[0], alpha.values[1]
    numerator = d * np.abs(x) ** 2 + a * np.abs(y) ** 2 - 2.0 * np.real(np.conj(x) * b * y)
    return numerator / theta.determinant()


def pointwise_s(model: FoliatedModel, m: MetricField) -> np.ndarray:
    """
    The Schur quantity s = alpha* Theta^-1 alpha on the grid.

    Raises:
        NotPositiveError: if Theta fails strict positivity somewhere
    """
    theta = theta_matrix(model, m)
    min_eig = theta.min_eigenvalue()
    worst = int(np.argmin(min_eig))
    if not min_eig.flat[worst] > positivity_threshold(theta):
        raise NotPositiveError(_unravel(model, worst), min_eig.flat[worst])
    s = schur_quantity(theta, alpha_vector(model, m))
    return np.maximum(s, 0.0)


def exponent_of_metric(model: FoliatedModel, m: MetricField) -> ExponentReport:
    """
    Diederich-Fornaess exponent of one metric.

    Infeasibility (Theta not strictly positive somewhere) is a report state
    with eta = 0, never an error.
    """
    theta = theta_matrix(model, m)
    min_eig = theta.min_eigenvalue()
    worst = int(np.argmin(min_eig))
    threshold = positivity_threshold(theta)
    mean_trace = float(np.mean(theta.trace()))
    common = dict(
        min_theta_eig=float(min_eig.flat[worst]),
        min_eig_point=_unravel(model, worst),
        mean_trace_theta=mean_trace,
        threshold=threshold,
        model=model.describe(),
    )

    if not min_eig.flat[worst] > threshold:
        reason = MEAN_TRACE_REASON if model.is_periodic else "Theta is not positive definite everywhere"
        logger.info(f"Metric infeasible on {model.describe()}: min eigenvalue {min_eig.flat[worst]:.3e}")
        return ExponentReport(eta=0.0, feasible=False, reason=reason, **common)

    s = np.maximum(schur_quantity(theta, alpha_vector(model, m)), 0.0)
    peak = int(np.argmax(s))
    s_max = float(s.flat[peak])
    eta = 1.0 / (1.0 + s_max)
    logger.info(f"Exponent on {model.describe()}: eta = {eta:.9f} (s_max = {s_max:.6e})")
    return ExponentReport(
        eta=eta,
        feasible=True,
        s_max=s_max,
        argmax_point=_unravel(model, peak),
        **common,
    )


def _rank_one_update_positive(theta: np.ndarray, outer: np.ndarray, c: float, threshold: float) -> bool:
    matrices = np.moveaxis(theta - c * outer, (0, 1), (-2, -1))
    return bool(np.min(np.linalg.eigvalsh(matrices)) > threshold)


def exponent_bisection_oracle(model: FoliatedModel, m: MetricField, tol: float = 1e-6) -> float:
    """
    Independent oracle for the exponent: bisection over eta in (0, 1].

    Each candidate forms Theta - eta/(1-eta) alpha alpha* and tests its
    smallest eigenvalue (dense hermitian solver) over the grid.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    theta = theta_matrix(model, m)
    alpha = alpha_vector(model, m).values
    threshold = positivity_threshold(theta)
    outer = np.einsum("j...,k...->jk...", alpha, np.conj(alpha))

    if not _rank_one_update_positive(theta.values, outer, 0.0, threshold):
        return 0.0
    if not np.any(alpha):
        return 1.0

    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _rank_one_update_positive(theta.values, outer, mid / (1.0 - mid), threshold):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def exponent_bound(model: FoliatedModel) -> Optional[float]:
    """1/(n+1) on compact models; None on patches, where no global bound applies."""
    return 1.0 / (model.n + 1) if model.is_periodic else None
