"""
8-bit grayscale slice renders with a fixed overlay palette.

Intensities in the [0, 1] window map to gray levels 1..254, masked voxels
are drawn black (0) and the outline of the high-variation patch region
is drawn white (255), so every overlay is recoverable from the pixels.
"""
import logging
from typing import Optional

import numpy as np
from PIL import Image
from scipy import ndimage

from atmask.schemas import PatchScores, VariationMap, Volume3D
from atmask.utils.exceptions import DimensionMismatchError

logger = logging.getLogger(__name__)

MASK_VALUE = 0
OUTLINE_VALUE = 255
GRAY_LO = 1
GRAY_HI = 254
FOUR_CONNECTED = ndimage.generate_binary_structure(2, 1)


def window_to_gray(values: np.ndarray) -> np.ndarray:
    """[0, 1] -> 1..254; values outside the window are clipped."""
    unit = np.clip(np.asarray(values, dtype=np.float64), 0.0, 1.0)
    return (GRAY_LO + np.round(unit * (GRAY_HI - GRAY_LO))).astype(np.uint8)


def outline(region: np.ndarray) -> np.ndarray:
    """Pixels of ``region`` with a 4-neighbour outside it (the image border counts as outside)."""
    region = np.asarray(region, dtype=bool)
    return region & ~ndimage.binary_erosion(region, structure=FOUR_CONNECTED, border_value=0)


def high_variation_volume(scores: PatchScores) -> np.ndarray:
    """Voxel-level flags of patches scoring above tau."""
    voxels = scores.high_mask().reshape(scores.grid_dims)
    for axis in range(3):
        voxels = np.repeat(voxels, scores.patch_size, axis=axis)
    return voxels


def _upscale(image: Image.Image, scale: int) -> Image.Image:
    if scale == 1:
        return image
    return image.resize((image.width * scale, image.height * scale), resample=Image.Resampling.NEAREST)


def render_slice(
    volume: Volume3D,
    index: Optional[int] = None,
    mask: Optional[Volume3D] = None,
    high_var: Optional[np.ndarray] = None,
    scale: int = 1,
) -> Image.Image:
    """
    Render axial slice ``index`` (default: middle) as an "L" image.

    ``mask`` voxels > 0.5 become black; the boundary of ``high_var`` is
    drawn white on unmasked pixels.
    """
    index = volume.dims[0] // 2 if index is None else index
    if not 0 <= index < volume.dims[0]:
        raise IndexError(f"slice index {index} outside [0, {volume.dims[0]})")

    pixels = window_to_gray(volume.data[index])
    if high_var is not None:
        if high_var.shape != volume.dims:
            raise DimensionMismatchError(volume.dims, high_var.shape, what="high-variation overlay")
        pixels[outline(high_var[index])] = OUTLINE_VALUE
    if mask is not None:
        if mask.dims != volume.dims:
            raise DimensionMismatchError(volume.dims, mask.dims, what="mask overlay")
        pixels[mask.data[index] > 0.5] = MASK_VALUE

    return _upscale(Image.fromarray(pixels), scale)


def render_variation_map(map_: VariationMap, index: Optional[int] = None, scale: int = 1) -> Image.Image:
    """Variation map slice as gray levels 0..255."""
    index = map_.dims[0] // 2 if index is None else index
    values = np.clip(map_.data[index].astype(np.float64), 0.0, 1.0)
    pixels = np.round(values * 255.0).astype(np.uint8)
    return _upscale(Image.fromarray(pixels), scale)
