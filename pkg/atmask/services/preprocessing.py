"""
Intensity preprocessing and grid resampling for CT-like volumes.

HU clipping, normalization, isotropic trilinear resampling and the
zero-padding helpers that make a grid divisible by the patch size.
"""
import logging
import math
import warnings
from typing import Tuple

import numpy as np

from atmask.schemas import Normalization, PreprocessConfig, Volume3D
from atmask.schemas.common import Dims3
from atmask.utils.exceptions import (
    ConfigError,
    DegenerateVolumeWarning,
    DimensionMismatchError,
    NonFiniteVolumeError,
)

logger = logging.getLogger(__name__)

STD_GUARD = 1e-8


def _require_finite(v: Volume3D, context: str) -> None:
    bad = int(np.count_nonzero(~np.isfinite(v.data)))
    if bad:
        raise NonFiniteVolumeError(bad, context=context)


def clip_hu(data: np.ndarray, window: Tuple[float, float]) -> np.ndarray:
    lo, hi = window
    return np.clip(data.astype(np.float64), lo, hi)


def normalize_unit_range(data: np.ndarray, window: Tuple[float, float]) -> np.ndarray:
    """Affine map of [lo, hi] onto [0, 1]."""
    lo, hi = window
    return np.clip((data - lo) / (hi - lo), 0.0, 1.0)


def normalize_zero_mean_unit_var(data: np.ndarray) -> np.ndarray:
    """
    Standardize with the population standard deviation.

    A (near-)constant input returns zeros and emits a DegenerateVolumeWarning.
    """
    mean = float(data.mean())
    std = float(data.std())
    if std < STD_GUARD:
        message = f"constant volume (std={std:.3e}); zero_mean_unit_var returns zeros"
        logger.warning(message)
        warnings.warn(message, DegenerateVolumeWarning, stacklevel=3)
        return np.zeros_like(data)
    return (data - mean) / std


def preprocess(v: Volume3D, cfg: PreprocessConfig) -> Volume3D:
    """Clip to the HU window, then normalize. Resampling is a separate step."""
    _require_finite(v, "preprocess input")
    data = clip_hu(v.data, cfg.hu_window)
    if cfg.normalization == Normalization.UNIT_RANGE:
        data = normalize_unit_range(data, cfg.hu_window)
    else:
        data = normalize_zero_mean_unit_var(data)
    return v.with_data(data)


def resampled_dims(dims: Dims3, spacing: Tuple[float, float, float], target_spacing: float) -> Dims3:
    """round(d * s / t) per axis (half up), at least 1."""
    return tuple(max(1, int(math.floor(d * s / target_spacing + 0.5))) for d, s in zip(dims, spacing))


def _lerp_axis(data: np.ndarray, axis: int, n_out: int, spacing: float, target: float) -> np.ndarray:
    n_in = data.shape[axis]
    positions = (np.arange(n_out, dtype=np.float64) + 0.5) * target / spacing - 0.5
    positions = np.clip(positions, 0.0, n_in - 1)
    i0 = np.floor(positions).astype(np.int64)
    i1 = np.minimum(i0 + 1, n_in - 1)
    frac = positions - i0

    shape = [1, 1, 1]
    shape[axis] = n_out
    frac = frac.reshape(shape)
    a = np.take(data, i0, axis=axis)
    b = np.take(data, i1, axis=axis)
    return a + (b - a) * frac


def resample_isotropic(v: Volume3D, target_spacing: float) -> Volume3D:
    """
    Trilinear resampling onto an isotropic grid of ``target_spacing`` mm.

    Output voxel j along an axis samples input index (j + 0.5) * t / s - 0.5,
    clamped to the valid range. Applied separably, axis by axis.
    """
    if target_spacing is None or not math.isfinite(target_spacing) or target_spacing <= 0:
        raise ConfigError(f"target_spacing must be > 0, got {target_spacing}")
    _require_finite(v, "resample input")

    out_dims = resampled_dims(v.dims, v.spacing, target_spacing)
    data = v.data.astype(np.float64)
    lo, hi = float(data.min()), float(data.max())
    for axis in range(3):
        data = _lerp_axis(data, axis, out_dims[axis], v.spacing[axis], target_spacing)
    data = np.clip(data, lo, hi)

    logger.debug(f"Resampled {v.dims} @ {v.spacing} -> {out_dims} @ {target_spacing}")
    return Volume3D(data=data, spacing=(target_spacing,) * 3)


def run_preprocessing(v: Volume3D, cfg: PreprocessConfig) -> Volume3D:
    """preprocess followed by resample_isotropic when a target spacing is set."""
    out = preprocess(v, cfg)
    if cfg.target_spacing is not None:
        out = resample_isotropic(out, cfg.target_spacing)
    return out


def pad_to_patch(v: Volume3D, patch_size: int) -> Tuple[Volume3D, Dims3]:
    """
    Zero-pad each axis at its high end up to a multiple of ``patch_size``.

    Returns the padded volume and the original dims.
    """
    if patch_size < 1:
        raise ConfigError(f"patch_size must be >= 1, got {patch_size}")
    original = v.dims
    pad = [(0, (-d) % patch_size) for d in original]
    if not any(after for _, after in pad):
        return v, original
    return v.with_data(np.pad(v.data, pad, mode="constant", constant_values=0.0)), original


def crop_to_dims(v: Volume3D, dims: Dims3) -> Volume3D:
    """Keep the low corner of ``v`` with shape ``dims`` (inverse of pad_to_patch)."""
    if len(dims) != 3 or any(d < 1 or d > have for d, have in zip(dims, v.dims)):
        raise DimensionMismatchError(v.dims, tuple(dims), what="crop target")
    d0, d1, d2 = dims
    return v.with_data(v.data[:d0, :d1, :d2])
