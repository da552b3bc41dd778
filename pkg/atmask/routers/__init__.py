"""
Routers module for ATMask: one module per command-line area.
"""
from . import config_router
from . import experiment_router
from . import mask_router
from . import metrics_router
from . import texture_router
from . import training_router
from . import volume_router

__all__ = [
    "config_router",
    "experiment_router",
    "mask_router",
    "metrics_router",
    "texture_router",
    "training_router",
    "volume_router",
]
