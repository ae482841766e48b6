"""
Configuration management for c2lab.

Every field can be set through a ``C2LAB_`` prefixed environment variable or a
``.env`` file; the CLI overrides individual fields per invocation.
"""

from functools import lru_cache
from typing import Literal

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Runtime settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="C2LAB_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # -------------------------------------------------------------------------
    # Point Counting
    # -------------------------------------------------------------------------
    budget: int = Field(
        default=2**26,
        ge=1,
        description="Maximum number of polynomial evaluations for brute-force point counting",
    )
    batch_size: int = Field(
        default=4096,
        ge=1,
        le=1 << 20,
        description="Points evaluated per vectorised determinant batch",
    )
    threads: int = Field(
        default=1,
        ge=1,
        le=256,
        description="Worker threads for data-parallel kernels (results are identical for every value)",
    )

    # -------------------------------------------------------------------------
    # Recurrence Engine
    # -------------------------------------------------------------------------
    state_cap: int = Field(
        default=10**6,
        ge=1,
        description="Maximum number of reachable partition states before giving up",
    )
    warmup_extra: int = Field(
        default=5,
        ge=0,
        le=50,
        description="Extra direct computations beyond r + stride when solving a family",
    )
    overlap: int = Field(
        default=3,
        ge=3,
        le=50,
        description="Minimum number of indices where recurrence and direct values must agree",
    )
    experimental_odd_p: bool = Field(
        default=False,
        description="Allow the recurrence engine to run for p > 2 (signs are experimental)",
    )

    # -------------------------------------------------------------------------
    # Logging Configuration
    # -------------------------------------------------------------------------
    environment: Literal["development", "production"] = Field(
        default="development",
        description="Deployment environment; production switches logs to JSON",
    )
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = Field(
        default="WARNING",
        description="Minimum level for structured log events",
    )
    json_logs: bool = Field(
        default=False,
        description="Emit JSON log lines regardless of environment",
    )

    @property
    def is_production(self) -> bool:
        """Check if running in production environment."""
        return self.environment == "production"

    @property
    def is_development(self) -> bool:
        """Check if running in development environment."""
        return self.environment == "development"


@lru_cache
def get_settings() -> Settings:
    """Settings read once from the environment; the CLI copies and overrides them."""
    return Settings()
