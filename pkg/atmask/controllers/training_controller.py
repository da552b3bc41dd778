"""
Training controller: toy masked-autoencoder pretraining.
"""
import logging
from pathlib import Path
from typing import List, Optional, Tuple

from atmask.repositories import ArtifactRepository, VolumeRepository
from atmask.schemas import RunConfig, TrainResult, Volume3D
from atmask.services.phantom import standard_phantoms
from atmask.services.trainer import pretrain_toy

logger = logging.getLogger(__name__)

LOSS_TRACE_FILE = "loss_trace.tsv"
WEIGHTS_FILE = "model.weights"
DEFAULT_DIR = "pretrain-toy"


def load_volume_set(
    volume_repo: VolumeRepository, data_dir: Optional[Path], cfg: RunConfig
) -> List[Tuple[str, Volume3D]]:
    """Named volumes from ``data_dir``, or the standard phantom set when no directory is given."""
    if data_dir is None:
        return [(name, phantom.volume) for name, phantom in standard_phantoms(cfg.phantom)]
    return [(path.stem, volume_repo.load(path)) for path in volume_repo.list_volumes(data_dir)]


class TrainingController:
    """Controller for toy pretraining runs."""

    def __init__(self, volume_repo: VolumeRepository, artifact_repo: ArtifactRepository):
        self.volume_repo = volume_repo
        self.artifact_repo = artifact_repo

    def pretrain(self, data_dir: Optional[Path], output_dir: Optional[Path], cfg: RunConfig) -> Tuple[TrainResult, Path]:
        """Train, then write the loss trace and weights under ``output_dir`` (default <output_dir>/pretrain-toy)."""
        named = load_volume_set(self.volume_repo, data_dir, cfg)
        logger.info(f"Pretraining on {len(named)} volume(s) for {cfg.train.steps} step(s)")
        result = pretrain_toy(
            [volume for _, volume in named],
            cfg.tvm,
            cfg.mask,
            cfg.train,
            threads=cfg.threads or 1,
        )
        output_dir = self.artifact_repo.output_dir_for(output_dir, DEFAULT_DIR)
        self.artifact_repo.write_loss_trace(result.loss_trace, output_dir / LOSS_TRACE_FILE)
        self.artifact_repo.save_model(result.model, output_dir / WEIGHTS_FILE)
        return result, output_dir
