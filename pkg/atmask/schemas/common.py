"""
Common enums and array helpers used across the schemas.
"""
from enum import Enum
from typing import Tuple

import numpy as np

Dims3 = Tuple[int, int, int]
Spacing3 = Tuple[float, float, float]


class Normalization(str, Enum):
    """Intensity normalization applied after HU clipping."""
    UNIT_RANGE = "unit_range"
    ZERO_MEAN_UNIT_VAR = "zero_mean_unit_var"


class PartialGroupMode(str, Enum):
    """What to do with trailing slices that do not fill a whole slice group."""
    LITERAL_ZERO = "paper_literal_zero"
    PROCESS_REMAINDER = "process_remainder"


class NormalizationScope(str, Enum):
    """Extent over which gradient and variance cues are min-max normalized."""
    PER_SLICE = "per_slice"
    GLOBAL = "global"


class ThresholdMode(str, Enum):
    """How the high-variation threshold is interpreted."""
    FIXED = "fixed"
    QUANTILE = "quantile"


class RemainderPool(str, Enum):
    """Pool from which the non-high-variation share of masks is drawn."""
    ALL_REMAINING = "all_remaining"
    LOW_VARIATION_FIRST = "low_variation_first"


class OptimizerKind(str, Enum):
    """Toy trainer optimizer."""
    SGD = "sgd"
    ADAMW = "adamw"


class LrSchedule(str, Enum):
    """Learning-rate schedule for the toy trainer."""
    CONSTANT = "constant"
    WARMUP_COSINE = "warmup_cosine"


class MaskInputMode(str, Enum):
    """What the reconstruction network sees at masked patches."""
    MASK_TOKEN = "mask_token"
    ZEROS = "zeros"


class PhantomKind(str, Enum):
    """Synthetic phantom geometry."""
    SPHERE_SHELL = "sphere_shell"
    TUBE = "tube"
    TEXTURED_BLOCK = "textured_block"
    CONSTANT = "constant"


def frozen_array(value, dtype) -> np.ndarray:
    """Copy ``value`` into a C-contiguous read-only array of ``dtype``."""
    array = np.array(value, dtype=dtype, order="C", copy=True)
    array.setflags(write=False)
    return array
