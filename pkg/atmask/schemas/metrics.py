"""
Segmentation metric schemas.
"""
from typing import Optional

from pydantic import BaseModel, ConfigDict, model_validator

from .common import Spacing3
from .volume import Volume3D


class SegPair(BaseModel):
    """Binary prediction / ground-truth pair on one grid."""
    model_config = ConfigDict(frozen=True)

    prediction: Volume3D
    ground_truth: Volume3D
    spacing: Optional[Spacing3] = None

    @model_validator(mode="after")
    def _same_grid(self) -> "SegPair":
        if self.prediction.dims != self.ground_truth.dims:
            raise ValueError(
                f"prediction dims {self.prediction.dims} != ground truth dims {self.ground_truth.dims}"
            )
        if self.spacing is None and self.prediction.spacing != self.ground_truth.spacing:
            raise ValueError(
                f"prediction spacing {self.prediction.spacing} != ground truth spacing "
                f"{self.ground_truth.spacing}; pass an explicit spacing"
            )
        return self

    @property
    def effective_spacing(self) -> Spacing3:
        return self.spacing if self.spacing is not None else self.ground_truth.spacing


class MetricsReport(BaseModel):
    """DSC / IoU / HD95 for one pair; hd95 is None when either set is empty."""
    dsc: float
    iou: float
    hd95: Optional[float] = None
    hd95_defined: bool = True
    tp: int = 0
    t: int = 0
    p: int = 0
