"""Configuration for phmaps loaded from environment variables.

Provides a Settings object with type hints for IDE support. Values can be
overridden through the environment or a local `.env` file.
"""
from pathlib import Path

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_file=".env", extra="ignore")

    DEBUG: bool = False
    LOG_DIR: str = "./logs"
    LOG_FILE: str = "phmaps.log"
    OUTPUT_ROOT: str = "."

    # numeric oracle defaults
    PHARMONIC_SEED: int = 42
    FD_STEP: float = 1e-5
    FD_RESIDUAL_STEP: float = 2e-2
    FD_OUTER_STEP: float = 2e-2
    FD_POINTS: int = 100
    FD_R_MIN: float = 0.5
    FD_R_MAX: float = 2.0
    FD_RESIDUAL_TOL: float = 1e-4
    FD_INFLAP_TOL: float = 1e-6

    PLANNER_BUDGET: int = 6

    # desk-scale guards for the CLI
    WARN_MAX_DEGREE: int = 12
    WARN_MAX_VARS: int = 64


settings = Settings()

# Ensure log directory exists on startup
Path(settings.LOG_DIR).mkdir(parents=True, exist_ok=True)
