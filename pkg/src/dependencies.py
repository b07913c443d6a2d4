"""Dependency providers.

Factory functions for the registry and suite runners used by the CLI.
"""

from functools import lru_cache

from src.config import settings
from src.services.suites import SuiteConfig, SuiteRunner
from src.utils.structure_io import StructureRegistry


# Registry
@lru_cache()
def get_structure_registry() -> StructureRegistry:
    """Get cached registry of bundled structure files."""
    return StructureRegistry()


# Suites
def get_suite_config(
    trials: int | None = None,
    seed: int | None = None,
    degree_bound: int | None = None,
) -> SuiteConfig:
    """Settings, overridden by whichever command-line flags were given."""
    return SuiteConfig(
        trials=settings.trials if trials is None else trials,
        seed=settings.seed if seed is None else seed,
        degree_bound=settings.degree_bound if degree_bound is None else degree_bound,
        random_dim=settings.random_dim,
    )


@lru_cache()
def get_suite_runner(config: SuiteConfig) -> SuiteRunner:
    """Get cached runner for a configuration."""
    return SuiteRunner(config)
