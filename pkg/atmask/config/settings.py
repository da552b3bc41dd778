"""
Runtime settings for ATMask, loaded from environment variables and .env.

Per-run algorithm parameters live in RunConfig (atmask.schemas.run);
this module only carries process-level knobs.
"""
from functools import lru_cache
from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process-level settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
        populate_by_name=True,
    )

    # Reproducibility / parallelism
    seed: int = Field(default=0, ge=0, alias="ATMASK_SEED")
    threads: int = Field(default=1, ge=1, alias="ATMASK_THREADS")

    # Output location used when a command is given no explicit path
    output_dir: Path = Field(default=Path("./outputs"), alias="ATMASK_OUTPUT_DIR")

    # Logging Configuration
    log_level: str = Field(default="INFO", alias="ATMASK_LOG_LEVEL")
    log_dir: Path = Field(default=Path("./logs"), alias="ATMASK_LOG_DIR")
    log_json: bool = Field(default=True, alias="ATMASK_LOG_JSON")
    log_to_file: bool = Field(default=False, alias="ATMASK_LOG_TO_FILE")


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
