"""
Schemas module for ATMask.
"""
from .common import (
    LrSchedule,
    MaskInputMode,
    Normalization,
    NormalizationScope,
    OptimizerKind,
    PartialGroupMode,
    PhantomKind,
    RemainderPool,
    ThresholdMode,
)
from .volume import Volume3D, PreprocessConfig
from .texture import TvmConfig, SliceCues, VariationMap
from .mask import MaskConfig, PatchScores, PatchMask, CoverageReport
from .recon import (
    PARAM_NAMES,
    AdamWParams,
    ReconBatch,
    ToyMaeModel,
    TrainConfig,
    TrainResult,
)
from .metrics import SegPair, MetricsReport
from .phantom import PhantomSpec, Phantom
from .run import ExperimentConfig, MaskingRow, RunConfig, SensitivityRow, SummaryRow

__all__ = [
    # Common
    "LrSchedule",
    "MaskInputMode",
    "Normalization",
    "NormalizationScope",
    "OptimizerKind",
    "PartialGroupMode",
    "PhantomKind",
    "RemainderPool",
    "ThresholdMode",
    # Volume
    "Volume3D",
    "PreprocessConfig",
    # Texture
    "TvmConfig",
    "SliceCues",
    "VariationMap",
    # Mask
    "MaskConfig",
    "PatchScores",
    "PatchMask",
    "CoverageReport",
    # Recon
    "PARAM_NAMES",
    "AdamWParams",
    "ReconBatch",
    "ToyMaeModel",
    "TrainConfig",
    "TrainResult",
    # Metrics
    "SegPair",
    "MetricsReport",
    # Phantom
    "PhantomSpec",
    "Phantom",
    # Run
    "ExperimentConfig",
    "MaskingRow",
    "RunConfig",
    "SensitivityRow",
    "SummaryRow",
]
