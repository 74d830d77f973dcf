"""
Foliated Model Definitions

This module defines the pydantic models describing the concrete Levi-flat
manifolds every computation runs on: a single foliated chart with coordinates
(x_1, y_1, ..., x_n, y_n, t), sampled on a rectangular grid, whose leaves are
the level sets of the transverse coordinate tau = t - lambda . y.
"""

import math
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class ModelKind(str, Enum):
    """The three model families the laboratory knows about."""

    PERIODIC_PRODUCT = "periodic_product"
    PERIODIC_SHEARED = "periodic_sheared"
    OPEN_PATCH = "open_patch"


class GridSpec(BaseModel):
    """
    Discretization of the foliated chart.

    Sizes are points per axis in the fixed coordinate order
    (x_1, y_1, ..., x_n, y_n, t).
    """

    model_config = ConfigDict(frozen=True)

    sizes: Tuple[int, ...] = Field(..., description="Points per axis")

    @field_validator("sizes")
    @classmethod
    def validate_sizes(cls, sizes: Tuple[int, ...]) -> Tuple[int, ...]:
        if len(sizes) < 3 or len(sizes) % 2 == 0:
            raise ValueError(f"a grid needs an odd number >= 3 of axes, got {len(sizes)}")
        if any(s < 4 for s in sizes):
            raise ValueError(f"every axis needs at least 4 points, got {sizes}")
        return sizes

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(self.sizes)

    @property
    def rank(self) -> int:
        return len(self.sizes)


class FoliatedModel(BaseModel):
    """
    A concrete Levi-flat model.

    Attributes:
        n: complex dimension of the leaves (1 or 2)
        kind: product torus, sheared torus or open patch
        grid: the sampling grid
        shear: lambda, one entry per leaf coordinate; nonzero only when sheared
        bounds: per-axis interval; periodic axes are half-open [a, b),
            patch axes closed [a, b]
    """

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1, le=2, description="Leaf complex dimension")
    kind: ModelKind
    grid: GridSpec
    shear: Tuple[float, ...]
    bounds: Tuple[Tuple[float, float], ...]

    @field_validator("bounds")
    @classmethod
    def validate_bounds(cls, bounds: Tuple[Tuple[float, float], ...]) -> Tuple[Tuple[float, float], ...]:
        for a, b in bounds:
            if not (math.isfinite(a) and math.isfinite(b)) or not b > a:
                raise ValueError(f"axis bounds must be finite with a < b, got ({a}, {b})")
        return bounds

    @model_validator(mode="after")
    def validate_consistency(self) -> "FoliatedModel":
        dim = 2 * self.n + 1
        if self.grid.rank != dim:
            raise ValueError(f"grid has {self.grid.rank} axes but a model with n={self.n} needs {dim}")
        if len(self.shear) != self.n:
            raise ValueError(f"shear must have length n={self.n}, got {len(self.shear)}")
        if len(self.bounds) != dim:
            raise ValueError(f"bounds must cover {dim} axes, got {len(self.bounds)}")
        if not all(math.isfinite(s) for s in self.shear):
            raise ValueError("shear must be finite")

        sheared = any(s != 0.0 for s in self.shear)
        if self.kind is ModelKind.PERIODIC_SHEARED and not sheared:
            raise ValueError("a sheared model needs a nonzero shear vector")
        if self.kind is not ModelKind.PERIODIC_SHEARED and sheared:
            raise ValueError(f"{self.kind.value} models carry zero shear")

        if self.is_periodic:
            odd = [s for s in self.grid.sizes if s % 2]
            if odd:
                raise ValueError(f"periodic axes need even sizes, got {self.grid.sizes}")
        return self

    # Geometry -----------------------------------------------------------

    @property
    def dim(self) -> int:
        """Real dimension 2n + 1."""
        return 2 * self.n + 1

    @property
    def is_periodic(self) -> bool:
        """True for the compact (torus) families; every axis is then periodic."""
        return self.kind is not ModelKind.OPEN_PATCH

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.grid.shape

    @property
    def t_axis(self) -> int:
        return 2 * self.n

    def x_axis(self, j: int) -> int:
        """Axis of x_j for a 1-based leaf index j."""
        return 2 * (j - 1)

    def y_axis(self, j: int) -> int:
        """Axis of y_j for a 1-based leaf index j."""
        return 2 * (j - 1) + 1

    def lengths(self) -> Tuple[float, ...]:
        return tuple(b - a for a, b in self.bounds)

    def spacings(self) -> Tuple[float, ...]:
        """Grid spacing per axis: L/N on periodic axes, L/(N-1) on patch axes."""
        if self.is_periodic:
            return tuple(L / N for L, N in zip(self.lengths(), self.grid.sizes))
        return tuple(L / (N - 1) for L, N in zip(self.lengths(), self.grid.sizes))

    def volume(self) -> float:
        return float(np.prod(self.lengths()))

    def coordinates(self, axis: int) -> np.ndarray:
        """Sample points of one axis."""
        a, b = self.bounds[axis]
        N = self.grid.sizes[axis]
        if self.is_periodic:
            return a + (b - a) * np.arange(N) / N
        return np.linspace(a, b, N)

    def mesh(self) -> List[np.ndarray]:
        """Full coordinate arrays in the fixed axis order (ij indexing)."""
        return np.meshgrid(*(self.coordinates(a) for a in range(self.dim)), indexing="ij")

    def axis_names(self) -> List[str]:
        names: List[str] = []
        for j in range(1, self.n + 1):
            names += [f"x{j}", f"y{j}"]
        return names + ["t"]

    def describe(self) -> str:
        sizes = "x".join(str(s) for s in self.grid.sizes)
        return f"{self.kind.value}(n={self.n}, {sizes})"


def _default_bounds(kind: ModelKind, dim: int) -> Tuple[Tuple[float, float], ...]:
    if kind is ModelKind.OPEN_PATCH:
        return tuple((-1.0, 1.0) for _ in range(dim))
    return tuple((0.0, 1.0) for _ in range(dim))


def build_model(
    n: int,
    kind: ModelKind,
    grid: GridSpec,
    shear: Optional[Sequence[float]] = None,
    bounds: Optional[Sequence[Sequence[float]]] = None,
) -> FoliatedModel:
    """
    Build and validate a foliated model.

    Args:
        n: leaf complex dimension (1 or 2)
        kind: model family
        grid: sampling grid, one size per axis
        shear: lambda vector; defaults to zero
        bounds: per-axis intervals; defaults to [0, 1) on tori and [-1, 1] on patches

    Returns:
        FoliatedModel: the validated model

    Raises:
        pydantic.ValidationError: on dimension, shear or kind mismatch and odd periodic sizes
    """
    kind = ModelKind(kind)
    dim = 2 * n + 1
    return FoliatedModel(
        n=n,
        kind=kind,
        grid=grid,
        shear=tuple(float(s) for s in (shear if shear is not None else [0.0] * n)),
        bounds=tuple(
            (float(a), float(b)) for a, b in (bounds if bounds is not None else _default_bounds(kind, dim))
        ),
    )
