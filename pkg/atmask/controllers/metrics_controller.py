"""
Metrics controller.
"""
import logging
from pathlib import Path
from typing import Optional

from atmask.repositories import VolumeRepository
from atmask.schemas import MetricsReport, SegPair
from atmask.schemas.common import Spacing3
from atmask.services.metrics import evaluate
from atmask.utils.exceptions import ConfigError, DimensionMismatchError

logger = logging.getLogger(__name__)


class MetricsController:
    """Controller for segmentation metric evaluation."""

    def __init__(self, volume_repo: VolumeRepository):
        self.volume_repo = volume_repo

    def evaluate(self, pred_path: Path, gt_path: Path, spacing: Optional[Spacing3] = None) -> MetricsReport:
        prediction = self.volume_repo.load(pred_path)
        ground_truth = self.volume_repo.load(gt_path)
        if prediction.dims != ground_truth.dims:
            raise DimensionMismatchError(ground_truth.dims, prediction.dims, what="prediction")
        if spacing is None and prediction.spacing != ground_truth.spacing:
            raise ConfigError(
                f"spacing differs ({prediction.spacing} vs {ground_truth.spacing}); pass --spacing"
            )
        report = evaluate(SegPair(prediction=prediction, ground_truth=ground_truth, spacing=spacing))
        logger.info(f"Metrics for {pred_path}: dsc={report.dsc:.4f}, iou={report.iou:.4f}, hd95={report.hd95}")
        return report
