"""
Config controller: effective run configuration.

Precedence: command-line flag > config file > environment > model default.
"""
import logging
from pathlib import Path
from typing import Any, Dict, Optional

from pydantic import ValidationError

from atmask.config.settings import Settings, get_settings
from atmask.repositories import ArtifactRepository
from atmask.schemas import RunConfig
from atmask.utils.exceptions import ConfigError

logger = logging.getLogger(__name__)

SEEDED_SECTIONS = ("mask", "train", "phantom")


class ConfigController:
    """Controller for building and persisting RunConfig documents."""

    def __init__(self, artifact_repo: ArtifactRepository, settings: Optional[Settings] = None):
        self.artifact_repo = artifact_repo
        self.settings = settings or get_settings()

    def resolve(
        self,
        config_path: Optional[Path] = None,
        seed: Optional[int] = None,
        threads: Optional[int] = None,
        overrides: Optional[Dict[str, Dict[str, Any]]] = None,
    ) -> RunConfig:
        """
        Merge defaults, the config file, environment settings and flag overrides.

        Section seeds not written explicitly in the file follow the global
        seed; a ``seed`` flag overrides every section seed.
        """
        base = self.artifact_repo.load_run_config(config_path) if config_path else RunConfig()
        effective_seed = seed if seed is not None else (base.seed if base.seed is not None else self.settings.seed)
        effective_threads = threads if threads is not None else (
            base.threads if base.threads is not None else self.settings.threads
        )

        data = base.model_dump(mode="json")
        for section in SEEDED_SECTIONS:
            explicit = section in base.model_fields_set and "seed" in getattr(base, section).model_fields_set
            if seed is not None or not explicit:
                data[section]["seed"] = effective_seed
        for section, updates in (overrides or {}).items():
            if section not in data or not isinstance(data[section], dict):
                raise ConfigError(f"unknown config section '{section}'")
            data[section].update({k: v for k, v in updates.items() if v is not None})
        data["seed"] = effective_seed
        data["threads"] = effective_threads

        try:
            config = RunConfig.model_validate(data)
        except ValidationError as e:
            err = e.errors()[0]
            location = ".".join(str(part) for part in err.get("loc", ()))
            raise ConfigError(f"invalid configuration {location}: {err.get('msg')}")
        logger.debug(f"Resolved run config: seed={config.seed}, threads={config.threads}")
        return config

    def dump(self, config: RunConfig, path: Path) -> Path:
        return self.artifact_repo.dump_run_config(config, path)
