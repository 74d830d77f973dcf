"""
Exterior Calculus Service Module

A small exterior-calculus engine on the grid of a foliated model. Forms are
stored in real coordinate components: a degree-k form is a map from strictly
increasing k-tuples of axis indices to complex fields; absent tuples are zero.

Provides wedge products, the exterior derivative, top-degree integration and
the pointwise linear operations (conj, add, scale).
"""

import logging
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, Iterable, List, Mapping, Optional, Tuple, Union

import numpy as np
from scipy.integrate import trapezoid

from lfl.exceptions import DegreeError, GridMismatchError
from lfl.models.foliation import FoliatedModel
from lfl.services.foliation_service import ensure_finite, ensure_on_grid, partial_derivative
from lfl.utils.parallel import parallel_map

logger = logging.getLogger(__name__)

Index = Tuple[int, ...]
Coefficient = Union[complex, float, np.ndarray]


@dataclass(frozen=True)
class DifferentialForm:
    """
    A differential form of degree ``degree`` on a ``dim``-dimensional model.

    Attributes:
        dim: real dimension of the model (2n + 1)
        degree: form degree, 0 <= degree <= dim
        components: strictly increasing index tuple -> complex field
    """

    dim: int
    degree: int
    components: Mapping[Index, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if not 0 <= self.degree <= self.dim:
            raise DegreeError(f"degree {self.degree} outside 0..{self.dim}")
        for index in self.components:
            if len(index) != self.degree:
                raise DegreeError(f"component {index} does not have degree {self.degree}")
            if any(a >= b for a, b in zip(index, index[1:])) or any(not 0 <= a < self.dim for a in index):
                raise DegreeError(f"component index {index} is not strictly increasing in 0..{self.dim - 1}")

    def component(self, index: Iterable[int], shape: Tuple[int, ...]) -> np.ndarray:
        """Component on ``index`` (zeros when absent)."""
        index = tuple(index)
        if index in self.components:
            return self.components[index]
        return np.zeros(shape, dtype=np.complex128)

    @property
    def indices(self) -> List[Index]:
        return sorted(self.components)

    def sup_norm(self) -> float:
        """Largest pointwise modulus over all components."""
        if not self.components:
            return 0.0
        return float(max(np.max(np.abs(c)) for c in self.components.values()))


def _as_complex(model: FoliatedModel, values: Coefficient) -> np.ndarray:
    arr = np.asarray(values)
    if arr.ndim == 0:
        return np.full(model.shape, complex(arr), dtype=np.complex128)
    ensure_on_grid(model, arr)
    return arr.astype(np.complex128, copy=False)


def zero_form(model: FoliatedModel, degree: int) -> DifferentialForm:
    """The zero form of the given degree."""
    return DifferentialForm(model.dim, degree, {})


def function_form(model: FoliatedModel, f: Coefficient) -> DifferentialForm:
    """A 0-form from a field or a constant."""
    return DifferentialForm(model.dim, 0, {(): _as_complex(model, f)})


def coordinate_form(model: FoliatedModel, axes: Iterable[int], coefficient: Coefficient = 1.0) -> DifferentialForm:
    """
    coefficient * da_1 ^ ... ^ da_k for the given axes (any order).

    The axes are sorted into a strictly increasing tuple with the matching
    permutation sign.
    """
    axes = tuple(axes)
    if len(set(axes)) != len(axes):
        return zero_form(model, len(axes))
    sign, index = _sort_with_sign(axes)
    values = _as_complex(model, coefficient)
    return DifferentialForm(model.dim, len(index), {index: values if sign > 0 else -values})


def _sort_with_sign(axes: Tuple[int, ...]) -> Tuple[int, Index]:
    inversions = sum(1 for i in range(len(axes)) for j in range(i + 1, len(axes)) if axes[i] > axes[j])
    return (-1 if inversions % 2 else 1), tuple(sorted(axes))


def _check_same_model(a: DifferentialForm, b: DifferentialForm) -> None:
    if a.dim != b.dim:
        raise GridMismatchError(f"forms live on models of dimension {a.dim} and {b.dim}")


def wedge(a: DifferentialForm, b: DifferentialForm) -> DifferentialForm:
    """
    Exterior product a ^ b.

    Contributions to one output component are grouped by the unordered pair
    of input tuples and summed in a fixed order, so that
    wedge(a, b) == (-1)^(deg a * deg b) wedge(b, a) holds bit for bit.

    Raises:
        DegreeError: if deg a + deg b exceeds the dimension
    """
    _check_same_model(a, b)
    degree = a.degree + b.degree
    if degree > a.dim:
        raise DegreeError(f"wedge of degrees {a.degree} and {b.degree} overflows dimension {a.dim}")

    grouped: Dict[Index, Dict[Tuple[Index, Index], List[Tuple[int, np.ndarray, np.ndarray]]]] = {}
    for I, J in product(a.components, b.components):
        if set(I) & set(J):
            continue
        sign, K = _sort_with_sign(I + J)
        f, g = a.components[I], b.components[J]
        first, second = (f, g) if (a.degree, I) <= (b.degree, J) else (g, f)
        key = tuple(sorted([I, J]))
        grouped.setdefault(K, {}).setdefault(key, []).append((sign, first, second))

    def assemble(K: Index) -> np.ndarray:
        total: Optional[np.ndarray] = None
        for key in sorted(grouped[K]):
            terms = [x * y if s > 0 else -(x * y) for s, x, y in grouped[K][key]]
            group = terms[0] if len(terms) == 1 else terms[0] + terms[1]
            total = group if total is None else total + group
        return total

    keys = sorted(grouped)
    values = parallel_map(assemble, keys)
    return DifferentialForm(a.dim, degree, dict(zip(keys, values)))


def ext_d(model: FoliatedModel, a: DifferentialForm) -> DifferentialForm:
    """
    Exterior derivative d(sum f_I dx^I) = sum_I sum_k (df_I/dx^k) dx^k ^ dx^I.

    Uses the model's derivative operators (spectral on tori, finite
    differences on patches).

    Raises:
        DegreeError: for top-degree input
    """
    if a.dim != model.dim:
        raise GridMismatchError(f"form of dimension {a.dim} on a {model.dim}-dimensional model")
    if a.degree >= model.dim:
        raise DegreeError("the exterior derivative of a top-degree form is not taken")

    jobs = [(I, k) for I in sorted(a.components) for k in range(model.dim) if k not in I]
    derivatives = parallel_map(lambda job: partial_derivative(model, a.components[job[0]], job[1]), jobs)

    out: Dict[Index, np.ndarray] = {}
    for (I, k), df in zip(jobs, derivatives):
        sign, K = _sort_with_sign((k,) + I)
        term = df if sign > 0 else -df
        out[K] = term if K not in out else out[K] + term
    return DifferentialForm(model.dim, a.degree + 1, out)


def integrate_top(model: FoliatedModel, a: DifferentialForm) -> complex:
    """
    Integral of a top-degree form against the positively oriented volume.

    Periodic axes use the trapezoidal rule (spectrally accurate for periodic
    integrands); patch axes use the composite trapezoid.

    Raises:
        DegreeError: unless deg a == dim
    """
    if a.degree != model.dim or a.dim != model.dim:
        raise DegreeError(f"only {model.dim}-forms are integrated, got degree {a.degree}")
    top = tuple(range(model.dim))
    if top not in a.components:
        return 0j
    values = ensure_finite(a.components[top], "top-degree coefficient")
    ensure_on_grid(model, values)
    if model.is_periodic:
        return complex(np.sum(values) * np.prod(model.spacings()))
    result = values
    for axis in reversed(range(model.dim)):
        result = trapezoid(result, dx=model.spacings()[axis], axis=axis)
    return complex(result)


def conj(a: DifferentialForm) -> DifferentialForm:
    """Complex conjugate; index tuples are unchanged."""
    return DifferentialForm(a.dim, a.degree, {I: np.conj(f) for I, f in a.components.items()})


def add(a: DifferentialForm, b: DifferentialForm) -> DifferentialForm:
    """
    Pointwise sum.

    Raises:
        DegreeError: on degree mismatch
    """
    _check_same_model(a, b)
    if a.degree != b.degree:
        raise DegreeError(f"cannot add forms of degrees {a.degree} and {b.degree}")
    out = dict(a.components)
    for I, g in b.components.items():
        out[I] = out[I] + g if I in out else g
    return DifferentialForm(a.dim, a.degree, out)


def scale(c: Coefficient, a: DifferentialForm) -> DifferentialForm:
    """Multiply by a constant or by a field on the grid."""
    return DifferentialForm(a.dim, a.degree, {I: c * f for I, f in a.components.items()})


def subtract(a: DifferentialForm, b: DifferentialForm) -> DifferentialForm:
    return add(a, scale(-1, b))


def wedge_power(model: FoliatedModel, a: DifferentialForm, k: int) -> DifferentialForm:
    """a ^ ... ^ a (k factors); the empty product is the constant 0-form 1."""
    if k < 0:
        raise DegreeError("negative wedge power")
    result = function_form(model, 1.0)
    for _ in range(k):
        result = wedge(result, a)
    return result
