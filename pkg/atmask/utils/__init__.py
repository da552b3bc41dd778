"""
Utility helpers for ATMask.
"""
from .exceptions import (
    ATMaskError,
    ConfigError,
    DegenerateVolumeWarning,
    DimensionMismatchError,
    GeometryError,
    NonFiniteVolumeError,
    PatchGridError,
    TrainingDivergedError,
    UsageError,
    VolumeFormatError,
)
from .rng import derive_seed, make_rng, sample_without_replacement

__all__ = [
    "ATMaskError",
    "ConfigError",
    "DegenerateVolumeWarning",
    "DimensionMismatchError",
    "GeometryError",
    "NonFiniteVolumeError",
    "PatchGridError",
    "TrainingDivergedError",
    "UsageError",
    "VolumeFormatError",
    "derive_seed",
    "make_rng",
    "sample_without_replacement",
]
