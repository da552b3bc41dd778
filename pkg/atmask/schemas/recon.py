"""
Toy reconstruction network and trainer schemas.
"""
import math
from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .common import LrSchedule, MaskInputMode, OptimizerKind, frozen_array
from .volume import Volume3D

PARAM_NAMES = ("w_enc", "b_enc", "w_dec", "b_dec", "mask_token")


class ToyMaeModel(BaseModel):
    """
    Per-patch affine-ReLU-affine autoencoder with a learned mask token.

    All weights are float32; ``patch_voxels`` is ``patch_size ** 3``.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    patch_size: int = Field(ge=1)
    embed_dim: int = Field(ge=1)
    w_enc: np.ndarray
    b_enc: np.ndarray
    w_dec: np.ndarray
    b_dec: np.ndarray
    mask_token: np.ndarray

    @field_validator(*PARAM_NAMES, mode="before")
    @classmethod
    def _as_float32(cls, value):
        return frozen_array(value, np.float32)

    @model_validator(mode="after")
    def _shapes(self) -> "ToyMaeModel":
        p, e = self.patch_voxels, self.embed_dim
        expected = {
            "w_enc": (p, e),
            "b_enc": (e,),
            "w_dec": (e, p),
            "b_dec": (p,),
            "mask_token": (p,),
        }
        for name, shape in expected.items():
            array = getattr(self, name)
            if array.shape != shape:
                raise ValueError(f"{name} has shape {array.shape}, expected {shape}")
            if not np.isfinite(array).all():
                raise ValueError(f"{name} holds non-finite weights")
        return self

    @property
    def patch_voxels(self) -> int:
        return self.patch_size ** 3

    def params(self) -> Dict[str, np.ndarray]:
        """Weights keyed by name, in serialization order."""
        return {name: getattr(self, name) for name in PARAM_NAMES}

    def with_params(self, params: Dict[str, np.ndarray]) -> "ToyMaeModel":
        return ToyMaeModel(patch_size=self.patch_size, embed_dim=self.embed_dim, **params)


class ReconBatch(BaseModel):
    """Masked input, target, voxel mask and (optionally) the prediction on one grid."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    input: Volume3D
    target: Volume3D
    mask: Volume3D
    prediction: Optional[Volume3D] = None

    @model_validator(mode="after")
    def _shared_dims(self) -> "ReconBatch":
        dims = self.target.dims
        for name in ("input", "mask", "prediction"):
            volume = getattr(self, name)
            if volume is not None and volume.dims != dims:
                raise ValueError(f"{name} dims {volume.dims} != target dims {dims}")
        return self


class AdamWParams(BaseModel):
    """Hyperparameters of the AdamW-like optimizer."""
    model_config = ConfigDict(extra="forbid")

    beta1: float = Field(default=0.9, ge=0.0, lt=1.0)
    beta2: float = Field(default=0.95, ge=0.0, lt=1.0)
    weight_decay: float = Field(default=0.05, ge=0.0)
    eps: float = Field(default=1e-8, gt=0.0)


class TrainConfig(BaseModel):
    """Toy pretraining loop configuration."""
    model_config = ConfigDict(extra="forbid")

    learning_rate: float = Field(default=1e-2, ge=0.0)
    steps: int = Field(default=200, ge=0)
    optimizer: OptimizerKind = OptimizerKind.SGD
    adamw: AdamWParams = Field(default_factory=AdamWParams)
    schedule: LrSchedule = LrSchedule.CONSTANT
    warmup_steps: int = Field(default=0, ge=0)
    loss_eps: float = Field(default=1e-8, gt=0.0)
    embed_dim: int = Field(default=16, ge=1)
    input_mode: MaskInputMode = MaskInputMode.MASK_TOKEN
    seed: int = Field(default=0, ge=0)

    @field_validator("learning_rate")
    @classmethod
    def _finite_lr(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("learning_rate must be finite")
        return value


class TrainResult(BaseModel):
    """Outcome of a toy pretraining run."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    model: ToyMaeModel
    loss_trace: List[float]

    @property
    def initial_loss(self) -> Optional[float]:
        return self.loss_trace[0] if self.loss_trace else None

    @property
    def final_loss(self) -> Optional[float]:
        return self.loss_trace[-1] if self.loss_trace else None
