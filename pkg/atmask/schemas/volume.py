"""
Volume schemas.
"""
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .common import Dims3, Normalization, Spacing3, frozen_array


class Volume3D(BaseModel):
    """
    Dense 3D float32 grid with per-axis spacing in millimeters.

    Axis 0 is the slice axis everywhere; ``data[z]`` is the 2D plane at
    slice index ``z``. The array is copied on construction and marked
    read-only, so a Volume3D never changes after it is built.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    data: np.ndarray
    spacing: Spacing3 = (1.0, 1.0, 1.0)

    @field_validator("data", mode="before")
    @classmethod
    def _as_float32_grid(cls, value):
        array = np.asarray(value)
        if array.ndim != 3:
            raise ValueError(f"volume data must be 3D, got shape {array.shape}")
        if min(array.shape) < 1:
            raise ValueError(f"volume dims must be positive, got {array.shape}")
        return frozen_array(array, np.float32)

    @field_validator("spacing")
    @classmethod
    def _positive_spacing(cls, value: Spacing3) -> Spacing3:
        if any(not np.isfinite(s) or s <= 0 for s in value):
            raise ValueError(f"spacing components must be > 0, got {value}")
        return tuple(float(s) for s in value)

    @property
    def dims(self) -> Dims3:
        return tuple(int(d) for d in self.data.shape)

    def with_data(self, data: np.ndarray, spacing: Optional[Spacing3] = None) -> "Volume3D":
        """New volume with replaced data (and optionally spacing)."""
        return Volume3D(data=data, spacing=self.spacing if spacing is None else spacing)


class PreprocessConfig(BaseModel):
    """HU clipping, normalization and resampling parameters."""
    model_config = ConfigDict(extra="forbid")

    hu_window: Tuple[float, float] = (-1000.0, 500.0)
    normalization: Normalization = Normalization.UNIT_RANGE
    target_spacing: Optional[float] = Field(default=0.5, gt=0)

    @model_validator(mode="after")
    def _ordered_window(self) -> "PreprocessConfig":
        lo, hi = self.hu_window
        if not lo < hi:
            raise ValueError(f"hu_window requires lo < hi, got {self.hu_window}")
        return self
