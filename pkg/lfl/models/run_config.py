"""
Run Configuration Models

Schema of the JSON run configurations read by the CLI and the HTTP routes.
Every model forbids unknown keys.
"""

from typing import Annotated, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from lfl.models.foliation import FoliatedModel, GridSpec, ModelKind, build_model
from lfl.models.metric import MetricPreset


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ModelSpec(StrictModel):
    """Model section of a run configuration."""

    n: int = Field(default=1, ge=1, le=2)
    kind: ModelKind = ModelKind.PERIODIC_PRODUCT
    sizes: List[int] = Field(default_factory=lambda: [32, 32, 32])
    shear: Optional[List[float]] = None
    bounds: Optional[List[Tuple[float, float]]] = None

    def build(self) -> FoliatedModel:
        return build_model(self.n, self.kind, GridSpec(sizes=tuple(self.sizes)), self.shear, self.bounds)


class FileSource(StrictModel):
    source: Literal["file"]
    path: str


class SeededFourierSource(StrictModel):
    source: Literal["seeded_fourier"]
    seed: int = Field(default=0, ge=0)
    cutoff: int = Field(default=3, ge=1)
    amplitude: float = 0.1
    smoothness: float = Field(default=2.0, ge=0.0)


class PresetSource(StrictModel):
    source: Literal["preset"]
    name: MetricPreset
    epsilon: float = 0.1


MetricSource = Annotated[Union[FileSource, SeededFourierSource, PresetSource], Field(discriminator="source")]


class Tolerances(StrictModel):
    """Acceptance tolerances per check (relative residuals)."""

    identity: float = Field(default=1e-7, gt=0)
    exactness: float = Field(default=1e-7, gt=0)
    integral: float = Field(default=1e-8, gt=0)
    remark: float = Field(default=1e-8, gt=0)
    remark_imaginary: float = Field(default=1e-9, gt=0)
    oracle: float = Field(default=1e-6, gt=0)
    bound: float = Field(default=1e-9, gt=0)
    convergence: float = Field(default=0.1, gt=0, description="Largest residual contraction per refinement step")


class OptimizerConfig(StrictModel):
    """Settings of the two-phase simplex search over Fourier metrics."""

    cutoff: int = Field(default=1, ge=1)
    smoothness: float = Field(default=2.0, ge=0.0)
    amplitude: float = Field(default=1.0, gt=0.0)
    step: float = Field(default=0.1, gt=0.0, description="Initial simplex edge length")
    max_iterations_phase1: int = Field(default=200, ge=1)
    max_iterations_phase2: int = Field(default=200, ge=1)
    stall_iterations: int = Field(default=25, ge=1)
    improvement_tol: float = Field(default=1e-10, ge=0.0)
    temperatures: List[float] = Field(default_factory=lambda: [0.1, 0.03, 0.01])
    base_preset: Optional[MetricPreset] = Field(
        default=None, description="Analytic metric the Fourier perturbation is added to"
    )

    @field_validator("temperatures")
    @classmethod
    def validate_temperatures(cls, v: List[float]) -> List[float]:
        if not v or any(t <= 0 for t in v):
            raise ValueError("temperatures must be a non-empty list of positive numbers")
        return v


class RunConfig(StrictModel):
    """
    One command = one config file plus flag overrides.

    ``c`` is the exponent parameter of the exactness and integral checks
    (defaults to the proof's 1/n).
    """

    model: ModelSpec = Field(default_factory=ModelSpec)
    metric: MetricSource = Field(default_factory=lambda: PresetSource(source="preset", name=MetricPreset.ZERO))
    tolerances: Tolerances = Field(default_factory=Tolerances)
    optimizer: OptimizerConfig = Field(default_factory=OptimizerConfig)
    c: Optional[float] = Field(default=None, ge=0.0)
    bisection_tol: float = Field(default=1e-7, gt=0.0)
    convergence_sizes: List[int] = Field(default_factory=lambda: [8, 16, 32])
    output_dir: Optional[str] = None
    seed: Optional[int] = Field(
        default=None, ge=0, description="Optimizer seed; defaults to the seed of a seeded_fourier metric"
    )

    @model_validator(mode="after")
    def validate_model(self) -> "RunConfig":
        # Surface model inconsistencies at load time.
        self.model.build()
        return self

    @property
    def effective_seed(self) -> Optional[int]:
        if self.seed is not None:
            return self.seed
        return self.metric.seed if isinstance(self.metric, SeededFourierSource) else None
