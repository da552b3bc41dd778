"""
Texture-guided patch masking.

The variation map is average-pooled into non-overlapping cubic patches.
Patches scoring above tau form the high-variation set. Of the
m = floor(r * N_p) masks, m_h = min(floor(beta * m), N_h) go to randomly
chosen high-variation patches and the remaining m_r to randomly chosen
patches among those still unmasked.

Sampling order is fixed: permute the high-variation indices and take the
first m_h, then permute the remainder pool and take the first m_r.
"""
import logging
import math
from typing import Optional

import numpy as np

from atmask.schemas import (
    CoverageReport,
    MaskConfig,
    PatchMask,
    PatchScores,
    RemainderPool,
    ThresholdMode,
    VariationMap,
    Volume3D,
)
from atmask.schemas.common import Dims3
from atmask.utils.exceptions import DimensionMismatchError, PatchGridError
from atmask.utils.rng import make_rng, sample_without_replacement

logger = logging.getLogger(__name__)


def patch_grid(dims: Dims3, patch_size: int) -> Dims3:
    """Patch grid dims; raises PatchGridError on the first non-divisible axis."""
    for axis, d in enumerate(dims):
        if d % patch_size != 0:
            raise PatchGridError(axis, d, patch_size)
    return tuple(d // patch_size for d in dims)


def pool_patches(data: np.ndarray, patch_size: int) -> np.ndarray:
    """Mean over each non-overlapping cubic patch, shape = grid dims."""
    g0, g1, g2 = patch_grid(data.shape, patch_size)
    p = patch_size
    blocks = np.asarray(data, dtype=np.float64).reshape(g0, p, g1, p, g2, p)
    return blocks.mean(axis=(1, 3, 5))


def resolve_threshold(scores: np.ndarray, cfg: MaskConfig) -> float:
    """Fixed tau, or the tau-quantile of the scores in quantile mode."""
    if cfg.threshold_mode == ThresholdMode.QUANTILE:
        return float(np.quantile(scores, cfg.threshold_tau)) if scores.size else 0.0
    return cfg.threshold_tau


def patch_scores(map_: VariationMap, patch_size: int, tau: float = 0.5) -> PatchScores:
    """Average-pool the variation map into per-patch scores (axis-0-major)."""
    grid = pool_patches(map_.data, patch_size)
    scores = grid.ravel()
    return PatchScores(
        grid_dims=grid.shape,
        patch_size=patch_size,
        scores=scores,
        tau=tau,
        n_high=int(np.count_nonzero(scores > tau)),
    )


def score_patches(map_: VariationMap, cfg: MaskConfig) -> PatchScores:
    """patch_scores with tau resolved from the mask config."""
    raw = patch_scores(map_, cfg.patch_size, tau=cfg.threshold_tau)
    tau = resolve_threshold(raw.scores, cfg)
    if tau == raw.tau:
        return raw
    return raw.model_copy(update={"tau": tau, "n_high": int(np.count_nonzero(raw.scores > tau))})


def mask_counts(n_patches: int, n_high: int, ratio: float, beta: float):
    """(m, m_h, m_r) for a grid of ``n_patches`` with ``n_high`` high-variation patches."""
    m = int(math.floor(ratio * n_patches))
    m_h = min(int(math.floor(beta * m)), n_high)
    return m, m_h, m - m_h


def generate_mask(scores: PatchScores, cfg: MaskConfig) -> PatchMask:
    """
    Draw a texture-guided patch mask.

    Deterministic for a fixed (scores, cfg); every random draw comes from
    one Philox stream seeded with ``cfg.seed``.
    """
    n_patches = scores.n_patches
    high = scores.high_mask()
    n_high = int(high.sum())
    m, m_h, m_r = mask_counts(n_patches, n_high, cfg.mask_ratio_r, cfg.high_var_fraction_beta)

    rng = make_rng(cfg.seed)
    bits = np.zeros(n_patches, dtype=bool)
    chosen_high = sample_without_replacement(rng, np.flatnonzero(high), m_h)
    bits[chosen_high] = True

    if cfg.remainder_pool == RemainderPool.LOW_VARIATION_FIRST:
        low_pool = np.flatnonzero(~high)
        from_low = min(m_r, low_pool.size)
        chosen = sample_without_replacement(rng, low_pool, from_low)
        bits[chosen] = True
        if m_r > from_low:
            leftover_high = np.flatnonzero(high & ~bits)
            bits[sample_without_replacement(rng, leftover_high, m_r - from_low)] = True
    else:
        pool = np.flatnonzero(~bits)
        bits[sample_without_replacement(rng, pool, m_r)] = True

    logger.debug(f"Mask: N_p={n_patches}, N_h={n_high}, m={m}, m_h={m_h}, m_r={m_r}, seed={cfg.seed}")
    return PatchMask(
        grid_dims=scores.grid_dims,
        bits=bits,
        m=m,
        m_h=m_h,
        m_r=m_r,
        tau=scores.tau,
        n_high=n_high,
        seed=cfg.seed,
    )


def random_mask(grid_dims: Dims3, ratio: float, seed: int, scores: Optional[PatchScores] = None) -> PatchMask:
    """
    Uniform random baseline: floor(r * N_p) patches, no texture guidance.

    When ``scores`` is given, tau / n_high are carried for reporting; m_h
    then counts masked high-variation patches.
    """
    n_patches = int(np.prod(grid_dims))
    m = int(math.floor(ratio * n_patches))
    rng = make_rng(seed)
    bits = np.zeros(n_patches, dtype=bool)
    bits[sample_without_replacement(rng, np.arange(n_patches), m)] = True

    tau, n_high, m_h = 0.5, 0, 0
    if scores is not None:
        high = scores.high_mask()
        tau, n_high = scores.tau, int(high.sum())
        m_h = int(np.count_nonzero(bits & high))
    return PatchMask(grid_dims=grid_dims, bits=bits, m=m, m_h=m_h, m_r=m - m_h, tau=tau, n_high=n_high, seed=seed)


def expand_mask(pm: PatchMask, patch_size: int, spacing=(1.0, 1.0, 1.0)) -> Volume3D:
    """Voxel-level 0/1 mask: each patch bit fills a patch_size^3 block."""
    grid = pm.as_grid().astype(np.float32)
    voxels = grid
    for axis in range(3):
        voxels = np.repeat(voxels, patch_size, axis=axis)
    return Volume3D(data=voxels, spacing=spacing)


def pool_mask(mask: Volume3D, patch_size: int) -> np.ndarray:
    """Flat patch bits recovered from a voxel mask (any masked voxel marks its patch)."""
    g0, g1, g2 = patch_grid(mask.dims, patch_size)
    p = patch_size
    blocks = (mask.data > 0.5).reshape(g0, p, g1, p, g2, p)
    return blocks.any(axis=(1, 3, 5)).ravel()


def apply_mask(v: Volume3D, mask: Volume3D) -> Volume3D:
    """I * (1 - M): masked voxels become 0, the rest are untouched."""
    if v.dims != mask.dims:
        raise DimensionMismatchError(v.dims, mask.dims, what="mask")
    return v.with_data(np.where(mask.data > 0.5, np.float32(0.0), v.data))


def mask_coverage_stats(pm: PatchMask, scores: PatchScores, tau: Optional[float] = None) -> CoverageReport:
    """Overlap between a patch mask and the high-variation set (u_i > tau)."""
    if pm.grid_dims != scores.grid_dims:
        raise DimensionMismatchError(scores.grid_dims, pm.grid_dims, what="patch grid")
    high = scores.high_mask(tau)
    n_high = int(high.sum())
    masked_high = int(np.count_nonzero(pm.bits & high))

    masked_scores = scores.scores[pm.bits]
    unmasked_scores = scores.scores[~pm.bits]
    return CoverageReport(
        n_patches=pm.n_patches,
        n_high=n_high,
        m=pm.m,
        m_h=pm.m_h,
        m_r=pm.m_r,
        masked_high=masked_high,
        masked_high_fraction=masked_high / pm.m if pm.m else 0.0,
        high_coverage=masked_high / n_high if n_high else 1.0,
        mean_score_masked=float(masked_scores.mean()) if masked_scores.size else None,
        mean_score_unmasked=float(unmasked_scores.mean()) if unmasked_scores.size else None,
    )
