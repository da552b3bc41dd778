"""
Synthetic phantom schemas.
"""
from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from .common import Dims3, PhantomKind, Spacing3
from .volume import Volume3D


class PhantomSpec(BaseModel):
    """
    Geometry and intensities of a synthetic phantom.

    Coordinates are voxel indices; ``center=None`` means the grid center.
    ``box`` is (lo, hi) corners of the textured sub-box, hi exclusive;
    ``None`` means the central half of every axis.
    """
    model_config = ConfigDict(extra="forbid")

    kind: PhantomKind = PhantomKind.SPHERE_SHELL
    dims: Dims3 = (32, 32, 32)
    spacing: Spacing3 = (0.5, 0.5, 0.5)
    center: Optional[Tuple[float, float, float]] = None
    radius: float = Field(default=8.0, gt=0)
    axis: int = Field(default=0, ge=0, le=2)
    box: Optional[Tuple[Tuple[int, int, int], Tuple[int, int, int]]] = None
    background: float = 0.0
    foreground: float = 1.0
    noise_amplitude: float = Field(default=0.0, ge=0.0)
    seed: int = Field(default=0, ge=0)


class Phantom(BaseModel):
    """A phantom volume and the binary label of its structure."""
    model_config = ConfigDict(frozen=True)

    volume: Volume3D
    label: Volume3D
