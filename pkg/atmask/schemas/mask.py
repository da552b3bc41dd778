"""
Patch mask schemas.
"""
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .common import Dims3, RemainderPool, ThresholdMode, frozen_array


class MaskConfig(BaseModel):
    """Texture-guided masking parameters."""
    model_config = ConfigDict(extra="forbid")

    patch_size: int = Field(default=16, ge=1)
    mask_ratio_r: float = Field(default=0.75, ge=0.0, le=1.0)
    high_var_fraction_beta: float = Field(default=0.65, ge=0.0, le=1.0)
    threshold_tau: float = Field(default=0.5, ge=0.0, le=1.0)
    threshold_mode: ThresholdMode = ThresholdMode.FIXED
    remainder_pool: RemainderPool = RemainderPool.ALL_REMAINING
    seed: int = Field(default=0, ge=0, le=0xFFFFFFFFFFFFFFFF)


class PatchScores(BaseModel):
    """Mean variation score per non-overlapping cubic patch, axis-0-major."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    grid_dims: Dims3
    patch_size: int
    scores: np.ndarray
    tau: float
    n_high: int

    @field_validator("scores", mode="before")
    @classmethod
    def _flat_scores(cls, value):
        return frozen_array(np.asarray(value).ravel(), np.float64)

    @model_validator(mode="after")
    def _consistent(self) -> "PatchScores":
        if self.scores.size != self.n_patches:
            raise ValueError(f"scores length {self.scores.size} != grid size {self.n_patches}")
        if not 0 <= self.n_high <= self.n_patches:
            raise ValueError(f"n_high {self.n_high} out of range")
        return self

    @property
    def n_patches(self) -> int:
        g0, g1, g2 = self.grid_dims
        return g0 * g1 * g2

    def high_mask(self, tau: Optional[float] = None) -> np.ndarray:
        """Boolean flags of patches with u_i > tau (default: the recorded tau)."""
        return self.scores > (self.tau if tau is None else tau)


class PatchMask(BaseModel):
    """Binary patch-level mask with its allocation counts."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    grid_dims: Dims3
    bits: np.ndarray
    m: int
    m_h: int
    m_r: int
    tau: float = 0.5
    n_high: int = 0
    seed: int = 0

    @field_validator("bits", mode="before")
    @classmethod
    def _flat_bits(cls, value):
        return frozen_array(np.asarray(value).ravel(), np.bool_)

    @model_validator(mode="after")
    def _counts(self) -> "PatchMask":
        g0, g1, g2 = self.grid_dims
        if self.bits.size != g0 * g1 * g2:
            raise ValueError(f"bits length {self.bits.size} != grid size {g0 * g1 * g2}")
        if int(self.bits.sum()) != self.m or self.m != self.m_h + self.m_r:
            raise ValueError(
                f"inconsistent counts: popcount={int(self.bits.sum())}, m={self.m}, "
                f"m_h={self.m_h}, m_r={self.m_r}"
            )
        return self

    @property
    def n_patches(self) -> int:
        return int(self.bits.size)

    def as_grid(self) -> np.ndarray:
        return self.bits.reshape(self.grid_dims)


class CoverageReport(BaseModel):
    """How a patch mask relates to the high-variation set."""
    n_patches: int
    n_high: int
    m: int
    m_h: int
    m_r: int
    masked_high: int
    masked_high_fraction: float
    high_coverage: float
    mean_score_masked: Optional[float] = None
    mean_score_unmasked: Optional[float] = None
