"""
Overlap and surface-distance metrics for binary 3D masks.
"""
import logging
import math
from typing import Optional, Tuple

import numpy as np
from scipy import ndimage

from atmask.schemas import MetricsReport, SegPair
from atmask.schemas.common import Spacing3

logger = logging.getLogger(__name__)

DEFAULT_EPS = 1e-8
SIX_CONNECTED = ndimage.generate_binary_structure(3, 1)


def _binary(pair: SegPair) -> Tuple[np.ndarray, np.ndarray]:
    return pair.prediction.data > 0.5, pair.ground_truth.data > 0.5


def overlap_counts(pair: SegPair) -> Tuple[int, int, int]:
    """(TP, T, P): true positives, |G| and |P|."""
    pred, gt = _binary(pair)
    return int(np.count_nonzero(pred & gt)), int(np.count_nonzero(gt)), int(np.count_nonzero(pred))


def dsc(pair: SegPair, eps: float = DEFAULT_EPS) -> float:
    tp, t, p = overlap_counts(pair)
    return (2.0 * tp + eps) / (t + p + eps)


def iou(pair: SegPair, eps: float = DEFAULT_EPS) -> float:
    tp, t, p = overlap_counts(pair)
    return (tp + eps) / (t + p - tp + eps)


def surface(mask: np.ndarray) -> np.ndarray:
    """Voxels of ``mask`` removed by one 6-connected erosion (volume border counts as outside)."""
    mask = np.asarray(mask, dtype=bool)
    eroded = ndimage.binary_erosion(mask, structure=SIX_CONNECTED, border_value=0)
    return mask & ~eroded


def nearest_rank(values: np.ndarray, q: float = 0.95) -> float:
    """Nearest-rank percentile: element ceil(q * n) - 1 of the sorted values."""
    ordered = np.sort(values)
    index = max(0, int(math.ceil(q * ordered.size)) - 1)
    return float(ordered[index])


def directed_surface_distances(source: np.ndarray, target: np.ndarray, spacing: Spacing3) -> np.ndarray:
    """Distance (mm) from each surface voxel of ``source`` to the nearest surface voxel of ``target``."""
    source_surface = surface(source)
    target_surface = surface(target)
    _, indices = ndimage.distance_transform_edt(~target_surface, sampling=spacing, return_indices=True)
    points = np.nonzero(source_surface)
    s0, s1, s2 = spacing
    d0 = (points[0] - indices[0][points]) * s0
    d1 = (points[1] - indices[1][points]) * s1
    d2 = (points[2] - indices[2][points]) * s2
    return np.sqrt(d0 * d0 + d1 * d1 + d2 * d2)


def hd95(pair: SegPair) -> Optional[float]:
    """
    Symmetric 95th-percentile surface distance in mm.

    Returns None when either mask is empty.
    """
    pred, gt = _binary(pair)
    if not pred.any() or not gt.any():
        logger.warning("hd95 undefined: empty prediction or ground truth")
        return None
    spacing = pair.effective_spacing
    forward = nearest_rank(directed_surface_distances(pred, gt, spacing))
    backward = nearest_rank(directed_surface_distances(gt, pred, spacing))
    return max(forward, backward)


def evaluate(pair: SegPair, eps: float = DEFAULT_EPS) -> MetricsReport:
    tp, t, p = overlap_counts(pair)
    distance = hd95(pair)
    return MetricsReport(
        dsc=dsc(pair, eps),
        iou=iou(pair, eps),
        hd95=distance,
        hd95_defined=distance is not None,
        tp=tp,
        t=t,
        p=p,
    )
