"""
Metric Parameterization Models

Band-limited Fourier families of metric fields u = log h and the analytic
presets used as known-answer examples.
"""

from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator


class MetricPreset(str, Enum):
    """Analytic metric fields with hand-computable forms."""

    ZERO = "zero"            # u = 0
    QUADRATIC = "quadratic"  # u = -sum_j (x_j^2 + y_j^2)
    COSINE = "cosine"        # u = epsilon cos(2 pi x_1)


class FourierParam(BaseModel):
    """
    Band-limited Fourier family

        u(x) = amplitude * sum_{0 < |k|_inf <= K} Re(c_k e^{2 pi i k.x}) / (1 + |k|^2)^p

    with c_{-k} = conj(c_k). Only the half spectrum (first nonzero entry of k
    positive, lexicographic order) is stored; c_0 is dropped since constant
    shifts of u are a gauge.
    """

    model_config = ConfigDict(extra="forbid")

    cutoff: int = Field(..., ge=1, description="Frequency cutoff K per axis")
    smoothness: float = Field(default=2.0, ge=0.0, description="Smoothing exponent p")
    amplitude: float = Field(default=1.0, description="Overall amplitude")
    coefficients: Optional[List[Tuple[float, float]]] = Field(
        default=None, description="Half-spectrum coefficients as (re, im) pairs"
    )

    @field_validator("coefficients")
    @classmethod
    def validate_coefficients(cls, v):
        if v is not None and not v:
            raise ValueError("coefficients may be omitted but not empty")
        return v
