"""
Dependency wiring: repositories -> controllers.
"""
import logging
from pathlib import Path
from typing import Optional

from atmask.config.settings import get_settings
from atmask.controllers import (
    ConfigController,
    ExperimentController,
    MaskController,
    MetricsController,
    TextureController,
    TrainingController,
    VolumeController,
)
from atmask.repositories import ArtifactRepository, VolumeRepository

logger = logging.getLogger(__name__)


class Container:
    """Dependency container; one per CLI invocation."""

    def __init__(self, root: Optional[Path] = None):
        self.settings = get_settings()

        # Repositories
        self.volume_repo = VolumeRepository(root)
        self.artifact_repo = ArtifactRepository(root)

        # Controllers
        self.config_controller = ConfigController(self.artifact_repo, self.settings)
        self.volume_controller = VolumeController(self.volume_repo)
        self.texture_controller = TextureController(self.volume_repo, self.artifact_repo)
        self.mask_controller = MaskController(self.volume_repo, self.artifact_repo)
        self.training_controller = TrainingController(self.volume_repo, self.artifact_repo)
        self.metrics_controller = MetricsController(self.volume_repo)
        self.experiment_controller = ExperimentController(self.volume_repo, self.artifact_repo)


_container: Optional[Container] = None


def get_container() -> Container:
    """Get the process-wide container, creating it on first use."""
    global _container
    if _container is None:
        _container = Container()
    return _container


def reset_container() -> None:
    """Drop the cached container (settings changes take effect on next use)."""
    global _container
    _container = None


def get_config_controller() -> ConfigController:
    return get_container().config_controller


def get_volume_controller() -> VolumeController:
    return get_container().volume_controller


def get_texture_controller() -> TextureController:
    return get_container().texture_controller


def get_mask_controller() -> MaskController:
    return get_container().mask_controller


def get_training_controller() -> TrainingController:
    return get_container().training_controller


def get_metrics_controller() -> MetricsController:
    return get_container().metrics_controller


def get_experiment_controller() -> ExperimentController:
    return get_container().experiment_controller
