"""
diffset toolkit - Centralized Configuration
Uses Pydantic Settings for environment variable management with full type validation.
"""
from pathlib import Path
from typing import Literal, Optional
from functools import lru_cache

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class VerifySettings(BaseSettings):
    """Theorem-verification sweep configuration"""

    model_config = SettingsConfigDict(env_prefix="DIFFSET_VERIFY_", case_sensitive=False)

    default_samples: int = Field(default=100, ge=0, le=10_000_000, description="Random instances per modulus")
    default_seed: int = Field(default=0, ge=0, description="Master seed when --seed is omitted")
    identity_tolerance: float = Field(
        default=1e-9, description="Tolerance for numerical identities (realness, Parseval)"
    )
    inequality_slack: float = Field(
        default=1e-6, description="Slack added to the right side of numerical inequalities"
    )
    exhaustive_limit: int = Field(
        default=16, ge=2, le=24, description="Largest q allowed for all-subsets sweeps"
    )
    oracle_max_group: int = Field(
        default=30, ge=1, le=60, description="Largest |G| checked against the quadruple oracle"
    )
    report_timings: bool = Field(
        default=False, description="Emit runtime_ms (breaks byte-identical report streams)"
    )

    @field_validator("identity_tolerance", "inequality_slack")
    @classmethod
    def validate_positive(cls, v: float) -> float:
        """Tolerances must be strictly positive and small"""
        if not 0.0 < v < 1.0:
            raise ValueError(f"Tolerance must lie in (0, 1), got {v}")
        return v


class SearchSettings(BaseSettings):
    """Exact-search and extremal-search configuration"""

    model_config = SettingsConfigDict(env_prefix="DIFFSET_SEARCH_", case_sensitive=False)

    default_budget: int = Field(default=1000, ge=0, description="Hill-climb iterations")
    shift_enumeration_limit: int = Field(
        default=1_000_000, ge=1, description="Max shift vectors enumerated exhaustively"
    )
    shift_samples: int = Field(
        default=20_000, ge=1, description="Random shift vectors tried beyond the limit"
    )
    cover_node_limit: int = Field(
        default=50_000_000, ge=1_000, description="Branch-and-bound node cap per cover"
    )


class Settings(BaseSettings):
    """Main toolkit settings"""

    model_config = SettingsConfigDict(
        env_prefix="DIFFSET_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    app_name: str = Field(default="diffset toolkit", description="Program description in --help")

    # Nested configurations
    verify: VerifySettings = Field(default_factory=VerifySettings)
    search: SearchSettings = Field(default_factory=SearchSettings)

    # Arithmetic limits
    max_modulus: int = Field(default=2**20, ge=2, le=2**20, description="Largest supported q")
    max_modulus_2d: int = Field(default=2048, ge=2, le=2048, description="Largest q for Z_q x Z_q")

    # Workers
    jobs: int = Field(default=1, ge=1, le=256, description="Default --jobs (env DIFFSET_JOBS)")

    # Logging
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = Field(default="WARNING")
    log_file: Optional[Path] = Field(default=None, description="Log file path")
    enable_json_logging: bool = Field(default=False, description="Enable JSON logging")


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance"""
    return Settings()
