"""
Report Models Module

Pydantic models for everything the laboratory emits: exponent reports,
optimizer traces, verification reports and failure reports. All of them
serialize to JSON through ``model_dump_json``.
"""

from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


class ExponentReport(BaseModel):
    """
    Result of a Diederich-Fornaess exponent computation for one metric.

    eta is the closed-form supremum 1 / (1 + s_max); it is not attained when
    s_max > 0.
    """

    eta: float = Field(..., ge=0.0, le=1.0, description="Diederich-Fornaess exponent of the metric")
    feasible: bool = Field(..., description="Theta is strictly positive at every grid point")
    min_theta_eig: float = Field(..., description="Smallest eigenvalue of Theta over the grid")
    min_eig_point: Tuple[int, ...] = Field(..., description="Grid index of the smallest eigenvalue")
    s_max: Optional[float] = Field(default=None, ge=0.0, description="max of alpha* Theta^-1 alpha")
    argmax_point: Optional[Tuple[int, ...]] = Field(default=None, description="Grid index of s_max")
    mean_trace_theta: float = Field(..., description="Grid mean of tr Theta")
    threshold: float = Field(..., description="Strict positivity cutoff used")
    reason: Optional[str] = Field(default=None, description="Why the metric is infeasible")
    model: str = Field(..., description="Model description")

    @model_validator(mode="after")
    def validate_states(self) -> "ExponentReport":
        if not self.feasible and self.eta != 0.0:
            raise ValueError("an infeasible metric has exponent 0")
        if self.feasible and self.s_max is None:
            raise ValueError("a feasible report carries s_max")
        return self


class TraceRow(BaseModel):
    """One optimizer iteration."""

    iteration: int
    phase: int = Field(..., ge=1, le=2)
    temperature: Optional[float] = None
    min_eig: float
    s_max: Optional[float] = None
    eta: float
    simplex_size: float
    objective: float


class OptimizationTrace(BaseModel):
    """Iterate log of the metric optimizer."""

    seed: int
    parameters: int = Field(..., description="Number of real search parameters")
    rows: List[TraceRow] = Field(default_factory=list)
    best_iteration: Optional[int] = Field(
        default=None, description="Trace row of the returned metric; None if it is the start point or was never logged"
    )
    best_eta: float = 0.0
    stop_reason: str = ""


class CheckReport(BaseModel):
    """
    Outcome of one verification check.

    Serialized with ``by_alias=True`` so the pass flag appears as ``pass``.
    """

    model_config = ConfigDict(populate_by_name=True)

    check: str
    model: str
    seed: Optional[int] = None
    residual: float
    tolerance: float
    passed: bool = Field(..., alias="pass")
    value: Optional[Tuple[float, float]] = Field(
        default=None, description="Complex integral (re, im) where the check computes one"
    )
    details: Dict[str, float] = Field(default_factory=dict)


class ConvergenceRow(BaseModel):
    size: int
    identity_residual: float
    exactness_residual: float
    identity_ratio: Optional[float] = None
    exactness_ratio: Optional[float] = None


class CommandReport(BaseModel):
    """Top-level JSON report of one CLI command."""

    model_config = ConfigDict(populate_by_name=True)

    command: str
    status: str
    passed: bool = Field(..., alias="pass")
    checks: List[CheckReport] = Field(default_factory=list)
    exponent: Optional[ExponentReport] = None
    convergence: List[ConvergenceRow] = Field(default_factory=list)
    outputs: List[str] = Field(default_factory=list)
    elapsed_seconds: Optional[float] = Field(default=None, description="Timing; excluded from comparisons")


class FailureReport(BaseModel):
    """Machine-readable report of a command that could not finish."""

    status: str = "error"
    exit_code: int
    error_type: str
    message: str
