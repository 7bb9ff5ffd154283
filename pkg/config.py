"""Configuration management using Pydantic Settings."""

from pydantic_settings import BaseSettings, SettingsConfigDict
from pydantic import Field
from typing import Optional


class Settings(BaseSettings):
    """Solver defaults loaded from environment variables (prefix ``QLZ_``)."""

    model_config = SettingsConfigDict(
        env_prefix="QLZ_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Confluent hypergeometric kernel
    hyp1f1_switch_radius: float = Field(30.0, gt=0)
    hyp1f1_series_max_radius: float = Field(1000.0, gt=0)
    hyp1f1_asymptotic_min_radius: float = Field(15.0, gt=0)
    hyp1f1_series_tol: float = Field(1e-16, gt=0)
    hyp1f1_series_max_terms: int = Field(10_000, ge=1)
    hyp1f1_native_radius: float = Field(8.0, ge=0)
    hyp1f1_asymptotic_order: int = Field(3, ge=1)
    hyp1f1_dispatch_max_order: int = Field(60, ge=1)

    # Weak coupling (closed form)
    asymptotic_time: float = 1e6

    # Strong coupling (ODE)
    rel_tol: float = Field(1e-9, gt=0)
    abs_tol: float = Field(1e-12, gt=0)
    n_max: int = Field(100, ge=1)
    # rel_tol is scaled down by reference/n_max above this truncation
    rel_tol_reference_n_max: int = Field(100, ge=1)
    samples: int = Field(2001, ge=2)
    truncation_threshold: float = Field(1e-6, gt=0)
    autosize_threshold: float = Field(1e-8, gt=0)
    max_nmax_doublings: int = Field(4, ge=0)
    norm_tolerance: float = Field(1e-8, gt=0)

    # Oracle
    oracle_rel_tol: float = Field(1e-11, gt=0)
    oracle_abs_tol: float = Field(1e-13, gt=0)
    oracle_convergence_tol: float = Field(1e-8, gt=0)
    oracle_steps_per_unit: int = Field(2000, ge=1)
    # dense matrices above this dimension are stepped with a sparse exponential action
    oracle_eigh_max_dimension: int = Field(128, ge=2)

    # Execution
    max_workers: int = Field(4, ge=1)
    output_dir: str = "exports"

    # Logging
    log_level: str = "INFO"
    log_file: Optional[str] = None


# Global settings instance
_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Get or create the global settings instance."""
    global _settings
    if _settings is None:
        _settings = Settings()
    return _settings
