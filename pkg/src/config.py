"""tmtool settings.

Limits, search bounds and trial seeds, read from TMTOOL_* environment variables.
"""

from functools import lru_cache

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from src.constants import FilePath, Limits


class Settings(BaseSettings):
    """Run-wide defaults; CLI flags override them per invocation."""

    model_config = SettingsConfigDict(
        env_prefix="TMTOOL_",
        env_file=FilePath.ENV_FILE,
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Limits
    max_dim: int = Field(
        default=Limits.MAX_DIM,
        ge=1,
        description="Largest exterior-algebra dimension accepted",
    )

    max_base_dim: int = Field(
        default=Limits.MAX_BASE_DIM,
        ge=1,
        description="Largest number of coordinates on the polynomial base",
    )

    # Searches
    degree_bound: int | None = Field(
        default=None,
        ge=0,
        description="Polynomial degree bound for coboundary searches (None: derived from inputs)",
    )

    # Randomized identity trials
    trials: int = Field(
        default=Limits.DEFAULT_TRIALS,
        ge=0,
        description="Number of seeded random trials per identity",
    )

    seed: int = Field(
        default=Limits.DEFAULT_SEED,
        description="Seed for randomized trials",
    )

    random_dim: int = Field(
        default=Limits.RANDOM_DIM,
        ge=2,
        description="Dimension of randomized identity trials",
    )

    # Logging
    log_level: str = Field(
        default="WARNING",
        description="Logging level",
    )

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate log level."""
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        if v.upper() not in valid_levels:
            raise ValueError(f"Invalid log level. Must be one of: {valid_levels}")
        return v.upper()


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()


settings = get_settings()
