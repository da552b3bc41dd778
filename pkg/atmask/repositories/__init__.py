"""
Repositories module for ATMask.
"""
from .base import BaseRepository
from .volume_repository import VolumeRepository, load_volume, save_volume
from .artifact_repository import ArtifactRepository

__all__ = [
    "BaseRepository",
    "VolumeRepository",
    "ArtifactRepository",
    "load_volume",
    "save_volume",
]
