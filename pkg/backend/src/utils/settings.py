"""
Module: settings
Description: Environment-driven runtime settings (caps, threads, logging)

All fields can be overridden with MNW_* environment variables or a .env file,
e.g. MNW_THREADS=8 or MNW_MAX_EXACT_MIXING_VERTICES=2048.
"""

import logging
from functools import lru_cache
from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from .exceptions import ParameterError

logger = logging.getLogger(__name__)


class Settings(BaseSettings):
    """
    Runtime settings

    Attributes:
        threads: Worker threads for parallel sections (never changes results)
        log_level: Root log level name
        log_json: Emit JSON log lines instead of plain text
        max_brute_force_vertices: Vertex cap for exact subset enumeration
        max_exact_mixing_vertices: Vertex cap for all-starts mixing time
        all_sources_fallback_vertices: Vertex cap for the all-sources BFS fallback
        reference_sampler_max_n: Largest side length for the per-pair sampler
        max_mixing_steps: Step cap for the mixing-time search
        max_power_iterations: Iteration cap for spectral power iteration
        renormalize_every: Renormalization period for distribution evolution
        sampled_starts: Default number of random starts in sampled mixing mode
        strict: Resource-cap violations are errors instead of skips
    """

    model_config = SettingsConfigDict(env_prefix="MNW_", env_file=".env", extra="ignore")

    threads: int = Field(1, ge=1)
    log_level: str = "INFO"
    log_json: bool = False
    max_brute_force_vertices: int = Field(24, ge=1)
    max_exact_mixing_vertices: int = Field(4096, ge=1)
    all_sources_fallback_vertices: int = Field(2**15, ge=1)
    reference_sampler_max_n: int = Field(32, ge=3)
    max_mixing_steps: int = Field(10**6, ge=1)
    max_power_iterations: int = Field(10**6, ge=1)
    renormalize_every: int = Field(1024, ge=1)
    sampled_starts: int = Field(32, ge=1)
    strict: bool = False


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """
    Get the process-wide Settings instance

    Returns:
        Cached Settings (call get_settings.cache_clear() after changing env vars)
    """
    settings = Settings()
    logger.debug(f"Loaded settings: {settings.model_dump()}")
    return settings


def resolve_threads(threads: Optional[int] = None) -> int:
    """Explicit thread count if given, else MNW_THREADS, else 1"""
    if threads is not None:
        if threads < 1:
            raise ParameterError(f"threads must be >= 1, got {threads}")
        return threads
    return get_settings().threads
