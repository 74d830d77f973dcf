"""
Verification Service Module

Numerical checks of the argument behind the bound eta(M) <= 1/(n+1) on
compact models:
- structure identities d eta = (alpha + conj alpha) ^ eta and
  d alpha ^ eta = Theta ^ eta
- exactness d(boundary(1/n)) = bulk(1/n)
- vanishing of the integral of bulk(1/n) (Stokes)
- the three-dimensional equality of the integrals of i Theta ^ eta and
  i alpha ^ conj(alpha) ^ eta
plus exploration helpers (positivity certificate, c-profile, convergence study).
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from lfl.config import settings
from lfl.exceptions import ModelMismatchError
from lfl.models.foliation import FoliatedModel, GridSpec, build_model
from lfl.models.reports import CheckReport, ConvergenceRow
from lfl.services.exterior import (
    add,
    conj,
    ext_d,
    integrate_top,
    scale,
    subtract,
    wedge,
)
from lfl.services.forms import (
    MetricField,
    alpha_form,
    boundary_form,
    bulk_form,
    eta_form,
    theta_form,
)
from lfl.services.metric_generator import seeded_fourier_metric

logger = logging.getLogger(__name__)

# Residuals below this are treated as resolved in the refinement study.
CONVERGENCE_FLOOR = 1e-10


def relative_residual(difference: float, reference: float) -> float:
    """difference / (reference + floor); the floor handles the zero metric."""
    return difference / (reference + settings.RESIDUAL_FLOOR)


def _require_periodic(model: FoliatedModel, check: str) -> None:
    if not model.is_periodic:
        raise ModelMismatchError(f"{check} needs a fully periodic model, got {model.describe()}")


def _default_c(model: FoliatedModel, c: Optional[float]) -> float:
    return 1.0 / model.n if c is None else c


def check_structure_identities(
    model: FoliatedModel, m: MetricField, tolerance: float = 1e-7, seed: Optional[int] = None
) -> CheckReport:
    """
    Sup-norm relative residuals of

        d eta = (alpha + conj alpha) ^ eta      and      d alpha ^ eta = Theta ^ eta.
    """
    _require_periodic(model, "the structure identities")
    alpha = alpha_form(model, m)
    eta = eta_form(model, m)
    theta, _ = theta_form(model, m)

    rhs_eta = wedge(add(alpha, conj(alpha)), eta)
    residual_eta = relative_residual(subtract(ext_d(model, eta), rhs_eta).sup_norm(), rhs_eta.sup_norm())

    rhs_alpha = wedge(theta, eta)
    lhs_alpha = wedge(ext_d(model, alpha), eta)
    residual_alpha = relative_residual(subtract(lhs_alpha, rhs_alpha).sup_norm(), rhs_alpha.sup_norm())

    residual = max(residual_eta, residual_alpha)
    logger.info(f"Structure identities on {model.describe()}: d eta {residual_eta:.3e}, d alpha {residual_alpha:.3e}")
    return CheckReport(
        check="identity",
        model=model.describe(),
        seed=seed,
        residual=residual,
        tolerance=tolerance,
        passed=residual <= tolerance,
        details={"d_eta": residual_eta, "d_alpha_wedge_eta": residual_alpha},
    )


def check_exactness(
    model: FoliatedModel,
    m: MetricField,
    c: Optional[float] = None,
    tolerance: float = 1e-7,
    seed: Optional[int] = None,
) -> CheckReport:
    """
    Sup-norm of d(boundary(c)) - bulk(c) relative to |bulk|_inf.

    The identity is exact only at c = 1/n; other values are for exploration.
    """
    _require_periodic(model, "the exactness check")
    c = _default_c(model, c)
    bulk = bulk_form(model, m, c)
    d_boundary = ext_d(model, boundary_form(model, m, c))
    residual = relative_residual(subtract(d_boundary, bulk).sup_norm(), bulk.sup_norm())
    logger.info(f"Exactness on {model.describe()} (c={c:.6g}): residual {residual:.3e}")
    return CheckReport(
        check="exactness",
        model=model.describe(),
        seed=seed,
        residual=residual,
        tolerance=tolerance,
        passed=residual <= tolerance,
        details={"c": c},
    )


def check_main_integral(model: FoliatedModel, m: MetricField, c: Optional[float] = None) -> complex:
    """Integral over M of (i Theta - c i alpha ^ conj alpha)^n ^ eta, c = 1/n by default."""
    _require_periodic(model, "the main integral")
    return integrate_top(model, bulk_form(model, m, _default_c(model, c)))


def main_integral_report(
    model: FoliatedModel, m: MetricField, tolerance: float = 1e-8, seed: Optional[int] = None
) -> CheckReport:
    """|integral of bulk(1/n)| relative to |bulk|_inf * vol."""
    _require_periodic(model, "the main integral")
    c = 1.0 / model.n
    bulk = bulk_form(model, m, c)
    value = integrate_top(model, bulk)
    residual = relative_residual(abs(value), bulk.sup_norm() * model.volume())
    logger.info(f"Main integral on {model.describe()}: {value:.3e} (relative {residual:.3e})")
    return CheckReport(
        check="integral",
        model=model.describe(),
        seed=seed,
        residual=residual,
        tolerance=tolerance,
        passed=residual <= tolerance,
        value=(value.real, value.imag),
    )


def _remark_integrals(model: FoliatedModel, m: MetricField) -> Tuple[complex, complex, float]:
    if model.n != 1:
        raise ModelMismatchError(f"the remark equality holds in real dimension 3, got n={model.n}")
    _require_periodic(model, "the remark equality")
    theta, _ = theta_form(model, m)
    alpha = alpha_form(model, m)
    eta = eta_form(model, m)
    curvature_side = wedge(scale(1j, theta), eta)
    connection_side = wedge(scale(1j, wedge(alpha, conj(alpha))), eta)
    scale_ref = max(curvature_side.sup_norm(), connection_side.sup_norm()) * model.volume()
    return integrate_top(model, curvature_side), integrate_top(model, connection_side), scale_ref


def check_remark_equality(model: FoliatedModel, m: MetricField) -> Tuple[float, float]:
    """
    The two sides of the three-dimensional equality, each integrated on its own:
    (integral of i Theta ^ eta, integral of i alpha ^ conj(alpha) ^ eta).

    Raises:
        ModelMismatchError: unless n = 1 on a periodic model
    """
    lhs, rhs, _ = _remark_integrals(model, m)
    return lhs.real, rhs.real


def remark_report(
    model: FoliatedModel,
    m: MetricField,
    tolerance: float = 1e-8,
    imaginary_tolerance: float = 1e-9,
    seed: Optional[int] = None,
) -> CheckReport:
    lhs, rhs, scale_ref = _remark_integrals(model, m)
    residual = relative_residual(abs(lhs.real - rhs.real), max(abs(lhs.real), abs(rhs.real)))
    imaginary = relative_residual(max(abs(lhs.imag), abs(rhs.imag)), scale_ref)
    passed = residual <= tolerance and imaginary <= imaginary_tolerance
    logger.info(f"Remark equality on {model.describe()}: {lhs.real:.9e} vs {rhs.real:.9e}")
    return CheckReport(
        check="remark",
        model=model.describe(),
        seed=seed,
        residual=residual,
        tolerance=tolerance,
        passed=passed,
        details={"curvature_side": lhs.real, "connection_side": rhs.real, "imaginary": imaginary},
    )


def positivity_certificate(model: FoliatedModel, m: MetricField) -> CheckReport:
    """
    Is the bulk integrand at c = 1/n pointwise positive on the grid?

    A positive integrand would contradict the vanishing integral, so on
    compact models the certificate never holds; ``passed`` is True exactly
    when the certificate is refuted.
    """
    _require_periodic(model, "the positivity certificate")
    bulk = bulk_form(model, m, 1.0 / model.n)
    top = bulk.component(range(model.dim), model.shape).real
    value = integrate_top(model, bulk)
    certified = bool(np.min(top) > 0.0)
    return CheckReport(
        check="positivity",
        model=model.describe(),
        residual=float(np.min(top)),
        tolerance=0.0,
        passed=not certified,
        value=(value.real, value.imag),
        details={"max_density": float(np.max(top)), "min_density": float(np.min(top))},
    )


def bulk_integral_profile(model: FoliatedModel, m: MetricField, cs: Sequence[float]) -> List[Tuple[float, float]]:
    """(c, integral of bulk(c)) for each exponent parameter; only c = 1/n is asserted to vanish."""
    profile = []
    for c in cs:
        value = integrate_top(model, bulk_form(model, m, c))
        profile.append((float(c), value.real))
    return profile


def convergence_study(
    n: int,
    kind: str,
    seed: int,
    cutoff: int,
    amplitude: float,
    sizes: Sequence[int],
    shear: Optional[Sequence[float]] = None,
    smoothness: float = 2.0,
) -> List[ConvergenceRow]:
    """
    Identity and exactness residuals of one band-limited metric at growing
    grid sizes, with the ratio to the previous size.
    """
    rows: List[ConvergenceRow] = []
    for size in sizes:
        model = build_model(n, kind, GridSpec(sizes=(size,) * (2 * n + 1)), shear)
        m = seeded_fourier_metric(model, seed, cutoff, amplitude, smoothness)
        identity = check_structure_identities(model, m).residual
        exactness = check_exactness(model, m).residual
        row = ConvergenceRow(size=size, identity_residual=identity, exactness_residual=exactness)
        if rows:
            prev = rows[-1]
            row.identity_ratio = prev.identity_residual / identity if identity > 0 else None
            row.exactness_ratio = prev.exactness_residual / exactness if exactness > 0 else None
        rows.append(row)
        logger.info(f"Convergence size {size}: identity {identity:.3e}, exactness {exactness:.3e}")
    return rows


def _contraction(residuals: Sequence[float], floor: float) -> float:
    worst = 0.0
    for prev, cur in zip(residuals, residuals[1:]):
        if prev <= floor or cur <= floor:
            continue
        worst = max(worst, cur / prev)
    return worst


def convergence_report(
    rows: Sequence[ConvergenceRow],
    model: str,
    tolerance: float = 0.1,
    floor: float = CONVERGENCE_FLOOR,
    seed: Optional[int] = None,
) -> CheckReport:
    """
    Spectral convergence of a refinement study.

    The residual is the largest contraction factor cur/prev between
    successive sizes; pairs where either residual is at or below ``floor``
    are not counted. A tolerance of 0.1 asks for a tenfold drop per step.
    """
    identity = _contraction([row.identity_residual for row in rows], floor)
    exactness = _contraction([row.exactness_residual for row in rows], floor)
    residual = max(identity, exactness)
    return CheckReport(
        check="convergence",
        model=model,
        seed=seed,
        residual=residual,
        tolerance=tolerance,
        passed=residual <= tolerance,
        details={"identity_contraction": identity, "exactness_contraction": exactness, "floor": floor},
    )
