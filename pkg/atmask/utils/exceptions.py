"""
Custom exceptions for ATMask.
"""
from pathlib import Path
from typing import Union


class ATMaskError(Exception):
    """Base exception for ATMask."""
    pass


class VolumeFormatError(ATMaskError):
    """Raised when a volume file cannot be decoded (dtype, header, payload size)."""
    def __init__(self, path: Union[str, Path], field: str, detail: str):
        self.path = str(path)
        self.field = field
        self.detail = detail
        super().__init__(f"{detail} (file={self.path}, field={field})")


class NonFiniteVolumeError(ATMaskError):
    """Raised when a volume holds NaN or Inf where finite voxels are required."""
    def __init__(self, count: int, context: str = ""):
        self.count = count
        where = f" in {context}" if context else ""
        super().__init__(f"non-finite voxel: {count} NaN/Inf value(s){where}")


class DimensionMismatchError(ATMaskError):
    """Raised when two volumes that must share a grid do not."""
    def __init__(self, expected: tuple, actual: tuple, what: str = "volume"):
        self.expected = tuple(expected)
        self.actual = tuple(actual)
        super().__init__(f"dim mismatch for {what}: expected {self.expected}, got {self.actual}")


class PatchGridError(ATMaskError):
    """Raised when a volume axis is not divisible by the patch size."""
    def __init__(self, axis: int, dim: int, patch_size: int):
        self.axis = axis
        self.dim = dim
        self.patch_size = patch_size
        super().__init__(
            f"axis {axis} has {dim} voxels, not divisible by patch size {patch_size}"
        )


class GeometryError(ATMaskError):
    """Raised when phantom geometry does not fit inside the volume."""
    pass


class ConfigError(ATMaskError):
    """Raised for invalid or unknown configuration values."""
    pass


class UsageError(ATMaskError):
    """Raised for command-line usage errors (unknown flags, unparseable values)."""
    pass


class TrainingDivergedError(ATMaskError):
    """Raised when the toy trainer produces a non-finite loss."""
    def __init__(self, step: int, loss: float):
        self.step = step
        self.loss = loss
        super().__init__(f"non-finite loss {loss} at step {step}")


class DegenerateVolumeWarning(UserWarning):
    """Warning channel for degenerate numeric inputs (e.g. constant volumes)."""
    pass
