"""
Controllers module for ATMask.
"""
from .config_controller import ConfigController
from .volume_controller import VolumeController
from .texture_controller import TextureController
from .mask_controller import MaskController
from .training_controller import TrainingController
from .metrics_controller import MetricsController
from .experiment_controller import ExperimentController

__all__ = [
    "ConfigController",
    "VolumeController",
    "TextureController",
    "MaskController",
    "TrainingController",
    "MetricsController",
    "ExperimentController",
]
