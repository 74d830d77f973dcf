"""
Application Configuration Module

This module defines the process-level settings of the Levi-flat laboratory.
All settings are loaded from environment variables (prefix ``LFL_``) with
appropriate defaults and validation.

Environment Variables:
- LFL_THREADS: cap on the worker pool used inside compute passes
- LFL_LOG_LEVEL: logging level for the CLI and the HTTP service
- LFL_OUTPUT_DIR: default directory for reports, traces and fields
- LFL_POSITIVITY_RTOL: relative cutoff of strict positivity
- LFL_RESIDUAL_FLOOR: absolute floor of relative residual denominators
"""

import os
from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    Application settings loaded from environment variables.

    Pydantic validates and converts every value; a malformed environment
    fails at import time rather than deep inside a computation.
    """

    model_config = SettingsConfigDict(
        env_prefix="LFL_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore",
    )

    # Application Information
    PROJECT_NAME: str = "Levi-flat laboratory"
    PROJECT_VERSION: str = "1.0.0"

    # Performance Configuration
    THREADS: Optional[int] = Field(
        default=None,
        description="Maximum number of worker threads (defaults to the CPU count)",
    )

    # Logging / output
    LOG_LEVEL: str = Field(default="INFO", description="Logging level")
    OUTPUT_DIR: str = Field(default="./runs", description="Default output directory")

    # Numerical tolerances
    POSITIVITY_RTOL: float = Field(
        default=1e-12,
        description="Strict positivity: min eigenvalue > POSITIVITY_RTOL * (1 + |Theta|)",
    )
    RESIDUAL_FLOOR: float = Field(
        default=1e-14,
        description="Absolute floor added to relative residual denominators",
    )

    @field_validator("THREADS")
    @classmethod
    def validate_threads(cls, v: Optional[int]) -> Optional[int]:
        """Reject non-positive thread caps."""
        if v is not None and v < 1:
            raise ValueError("THREADS must be at least 1")
        return v

    @field_validator("POSITIVITY_RTOL", "RESIDUAL_FLOOR")
    @classmethod
    def validate_tolerance(cls, v: float) -> float:
        """Tolerances must be strictly positive."""
        if not v > 0:
            raise ValueError("tolerances must be positive")
        return v

    @field_validator("LOG_LEVEL")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        level = v.upper()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"unknown log level: {v}")
        return level

    @property
    def worker_count(self) -> int:
        """Effective size of the worker pool."""
        return self.THREADS or os.cpu_count() or 1


# Global settings instance
settings = Settings()


def get_settings() -> Settings:
    """
    Get application settings instance.

    Returns:
        Settings: The application settings instance
    """
    return settings
