"""
Run configuration: one structured document mirroring every module config.
"""
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field

from .mask import MaskConfig
from .phantom import PhantomSpec
from .recon import TrainConfig
from .texture import TvmConfig
from .volume import PreprocessConfig


class ExperimentConfig(BaseModel):
    """Seed / ratio / beta / alpha grids for the masking experiments."""
    model_config = ConfigDict(extra="forbid")

    ratios: List[float] = Field(default_factory=lambda: [0.75])
    betas: List[float] = Field(default_factory=lambda: [0.0, 0.65])
    alphas: List[float] = Field(default_factory=lambda: [0.0, 0.2, 0.4, 0.6, 0.8, 1.0])
    n_seeds: int = Field(default=10, ge=1)
    train_steps: int = Field(default=0, ge=0)
    render: bool = True
    render_scale: int = Field(default=4, ge=1)


class RunConfig(BaseModel):
    """
    Full configuration of a run.

    Unknown keys are rejected at every level. ``seed`` and ``threads``
    left as None fall back to the environment settings.
    """
    model_config = ConfigDict(extra="forbid")

    seed: Optional[int] = Field(default=None, ge=0)
    threads: Optional[int] = Field(default=None, ge=1)
    preprocess: PreprocessConfig = Field(default_factory=PreprocessConfig)
    tvm: TvmConfig = Field(default_factory=TvmConfig)
    mask: MaskConfig = Field(default_factory=MaskConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)
    phantom: PhantomSpec = Field(default_factory=PhantomSpec)
    experiment: ExperimentConfig = Field(default_factory=ExperimentConfig)


class MaskingRow(BaseModel):
    """One (volume, method, r, beta, seed) line of the compare-masking table."""
    volume: str
    method: str
    ratio: float
    beta: Optional[float] = None
    seed: int
    n_patches: int
    n_high: int
    m: int
    m_h: int
    m_r: int
    masked_high: int
    masked_high_fraction: float
    high_coverage: float
    mean_score_masked: Optional[float] = None
    mean_score_unmasked: Optional[float] = None
    expected_high_fraction: float
    expected_high_fraction_se: float
    final_loss: Optional[float] = None


class SummaryRow(BaseModel):
    """Per (method, r, beta) aggregate over volumes and seeds."""
    method: str
    ratio: float
    beta: Optional[float] = None
    n_rows: int
    mean_masked_high_fraction: float
    se_masked_high_fraction: float
    mean_expected_high_fraction: float
    mean_score_masked: Optional[float] = None
    mean_final_loss: Optional[float] = None


class SensitivityRow(BaseModel):
    """Mask coverage averaged over volumes and seeds for one (alpha, beta)."""
    alpha: float
    beta: float
    n_rows: int
    mean_n_high: float
    mean_masked_high_fraction: float
    mean_high_coverage: float
    mean_score_masked: Optional[float] = None
