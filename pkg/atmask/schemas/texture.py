"""
Texture-variation schemas.
"""
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .common import Dims3, NormalizationScope, PartialGroupMode, frozen_array


class TvmConfig(BaseModel):
    """Parameters of the texture-variation map."""
    model_config = ConfigDict(extra="forbid")

    alpha: float = Field(default=0.6, ge=0.0, le=1.0)
    stride_s: int = Field(default=4, ge=1)
    var_window_w: int = Field(default=5, ge=3)
    gaussian_sigma: float = Field(default=1.0, ge=0.0)
    partial_group_mode: PartialGroupMode = PartialGroupMode.LITERAL_ZERO
    normalization_scope: NormalizationScope = NormalizationScope.PER_SLICE

    @field_validator("var_window_w")
    @classmethod
    def _odd_window(cls, value: int) -> int:
        if value % 2 != 1:
            raise ValueError(f"var_window_w must be odd, got {value}")
        return value


class SliceCues(BaseModel):
    """Gradient and local-variance cues of one slice, raw and min-max normalized."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    grad: np.ndarray
    var: np.ndarray
    grad_norm: np.ndarray
    var_norm: np.ndarray


class VariationMap(BaseModel):
    """Per-voxel texture score; values in [0, 1] once normalized."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    data: np.ndarray
    normalized: bool = True

    @field_validator("data", mode="before")
    @classmethod
    def _as_float32_grid(cls, value):
        array = np.asarray(value)
        if array.ndim != 3:
            raise ValueError(f"variation map must be 3D, got shape {array.shape}")
        return frozen_array(array, np.float32)

    @property
    def dims(self) -> Dims3:
        return tuple(int(d) for d in self.data.shape)
