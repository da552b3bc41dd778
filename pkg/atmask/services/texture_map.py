"""
Texture-variation map.

Per slice (axis 0), a Sobel gradient magnitude and a local variance map
are min-max normalized and blended with weight alpha. Slices are then
gathered into groups of ``stride_s``; each group takes the element-wise
maximum of its slice maps and broadcasts it back to every slice of the
group. The assembled volume is smoothed with a separable 3D Gaussian and
divided by its global maximum.

All filters use replicate (edge-clamp) boundaries.
"""
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Tuple

import numpy as np
from scipy import ndimage

from atmask.schemas import (
    NormalizationScope,
    PartialGroupMode,
    SliceCues,
    TvmConfig,
    VariationMap,
    Volume3D,
)
from atmask.utils.exceptions import NonFiniteVolumeError

logger = logging.getLogger(__name__)

Extrema = Tuple[float, float, float, float]


# ============================================
# PER-SLICE CUES
# ============================================

def slice_gradient(slice_2d: np.ndarray) -> np.ndarray:
    """Sobel gradient magnitude with replicate padding."""
    image = np.asarray(slice_2d, dtype=np.float64)
    g_axis0 = ndimage.sobel(image, axis=0, mode="nearest")
    g_axis1 = ndimage.sobel(image, axis=1, mode="nearest")
    return np.hypot(g_axis0, g_axis1)


def slice_variance(slice_2d: np.ndarray, w: int) -> np.ndarray:
    """Local variance E[x^2] - E[x]^2 over a w x w window, clamped at 0."""
    if w < 3 or w % 2 != 1:
        raise ValueError(f"variance window must be odd and >= 3, got {w}")
    image = np.asarray(slice_2d, dtype=np.float64)
    # centering keeps a constant slice at exactly zero
    centered = image - image.mean()
    mean = ndimage.uniform_filter(centered, size=w, mode="nearest")
    mean_sq = ndimage.uniform_filter(centered * centered, size=w, mode="nearest")
    return np.maximum(mean_sq - mean * mean, 0.0)


def minmax_normalize(values: np.ndarray, lo: Optional[float] = None, hi: Optional[float] = None) -> np.ndarray:
    """Min-max scale to [0, 1]; a zero range gives zeros."""
    lo = float(values.min()) if lo is None else lo
    hi = float(values.max()) if hi is None else hi
    span = hi - lo
    if not span > 0:
        return np.zeros_like(values, dtype=np.float64)
    return np.clip((values - lo) / span, 0.0, 1.0)


def slice_cues(slice_2d: np.ndarray, cfg: TvmConfig, extrema: Optional[Extrema] = None) -> SliceCues:
    """
    Raw and normalized gradient / variance maps of one slice.

    ``extrema`` = (g_min, g_max, v_min, v_max) replaces the per-slice
    extrema when normalizing over the whole volume.
    """
    grad = slice_gradient(slice_2d)
    var = slice_variance(slice_2d, cfg.var_window_w)
    if extrema is None:
        grad_norm = minmax_normalize(grad)
        var_norm = minmax_normalize(var)
    else:
        g_lo, g_hi, v_lo, v_hi = extrema
        grad_norm = minmax_normalize(grad, g_lo, g_hi)
        var_norm = minmax_normalize(var, v_lo, v_hi)
    return SliceCues(grad=grad, var=var, grad_norm=grad_norm, var_norm=var_norm)


def combine_cues(cues: SliceCues, alpha: float) -> np.ndarray:
    return alpha * cues.grad_norm + (1.0 - alpha) * cues.var_norm


def slice_variation(slice_2d: np.ndarray, cfg: TvmConfig, extrema: Optional[Extrema] = None) -> np.ndarray:
    """alpha * G_hat + (1 - alpha) * V_hat for one slice."""
    return combine_cues(slice_cues(slice_2d, cfg, extrema), cfg.alpha)


def volume_cue_extrema(data: np.ndarray, cfg: TvmConfig) -> Extrema:
    """Gradient and variance extrema over every slice of a volume."""
    g_lo = v_lo = math.inf
    g_hi = v_hi = -math.inf
    for z in range(data.shape[0]):
        grad = slice_gradient(data[z])
        var = slice_variance(data[z], cfg.var_window_w)
        g_lo, g_hi = min(g_lo, float(grad.min())), max(g_hi, float(grad.max()))
        v_lo, v_hi = min(v_lo, float(var.min())), max(v_hi, float(var.max()))
    return g_lo, g_hi, v_lo, v_hi


# ============================================
# GROUPING, BLUR, ASSEMBLY
# ============================================

def group_bounds(depth: int, stride: int, mode: PartialGroupMode) -> List[Tuple[int, int]]:
    """
    [start, stop) slice ranges of each group along axis 0.

    In ``paper_literal_zero`` mode a trailing partial group is dropped, so its
    slices stay at zero in the map.
    """
    bounds = []
    for start in range(0, depth, stride):
        stop = start + stride
        if stop <= depth:
            bounds.append((start, stop))
        elif mode == PartialGroupMode.PROCESS_REMAINDER:
            bounds.append((start, depth))
    return bounds


def gaussian_kernel_1d(sigma: float) -> np.ndarray:
    """Sampled Gaussian of radius ceil(3 sigma), normalized to sum 1."""
    radius = int(math.ceil(3.0 * sigma))
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    kernel = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return kernel / kernel.sum()


def gaussian_blur_3d(volume: np.ndarray, sigma: float) -> np.ndarray:
    """Separable 3D Gaussian blur with replicate padding; sigma=0 is the identity."""
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    out = np.array(volume, dtype=np.float64)
    if sigma == 0:
        return out
    kernel = gaussian_kernel_1d(sigma)
    for axis in range(out.ndim):
        out = ndimage.correlate1d(out, kernel, axis=axis, mode="nearest")
    return out


def _group_max(
    data: np.ndarray, start: int, stop: int, cfg: TvmConfig, extrema: Optional[Extrema]
) -> np.ndarray:
    group = np.zeros(data.shape[1:], dtype=np.float64)
    for z in range(start, stop):
        np.maximum(group, slice_variation(data[z], cfg, extrema), out=group)
    return group


def compute_variation_map(v: Volume3D, cfg: TvmConfig, threads: int = 1) -> VariationMap:
    """
    Texture-variation map of ``v``.

    Groups are evaluated on up to ``threads`` workers; each writes its own
    slice range, and the blur runs only after every group has finished,
    so the result does not depend on scheduling.
    """
    bad = int(np.count_nonzero(~np.isfinite(v.data)))
    if bad:
        raise NonFiniteVolumeError(bad, context="variation map input")

    started = time.perf_counter()
    data = v.data.astype(np.float64)
    extrema = volume_cue_extrema(data, cfg) if cfg.normalization_scope == NormalizationScope.GLOBAL else None
    bounds = group_bounds(v.dims[0], cfg.stride_s, cfg.partial_group_mode)
    raw = np.zeros(v.dims, dtype=np.float64)

    def fill(bound: Tuple[int, int]) -> None:
        start, stop = bound
        raw[start:stop] = _group_max(data, start, stop, cfg, extrema)

    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(fill, bounds))
    else:
        for bound in bounds:
            fill(bound)

    smoothed = gaussian_blur_3d(raw, cfg.gaussian_sigma)
    peak = float(smoothed.max())
    if peak > 0:
        smoothed = np.clip(smoothed / peak, 0.0, 1.0)
    else:
        smoothed = np.zeros_like(smoothed)

    logger.debug(
        f"Variation map for {v.dims}: {len(bounds)} groups, peak={peak:.4g}",
        extra={"duration_ms": round((time.perf_counter() - started) * 1000, 2)},
    )
    return VariationMap(data=smoothed, normalized=True)
