"""
Experiment controller: compare-masking and sensitivity sweeps.
"""
import logging
from pathlib import Path
from typing import List, Optional, Tuple

from atmask.controllers.training_controller import load_volume_set
from atmask.repositories import ArtifactRepository, VolumeRepository
from atmask.schemas import RunConfig, SensitivityRow
from atmask.services.experiments import ComparisonResult, compare_masking, sensitivity_sweep, summarize

logger = logging.getLogger(__name__)

STATS_FILE = "masking_stats.tsv"
SUMMARY_FILE = "masking_summary.tsv"
SENSITIVITY_FILE = "sensitivity.tsv"
RENDER_DIR = "renders"


class ExperimentController:
    """Controller for the masking experiments."""

    def __init__(self, volume_repo: VolumeRepository, artifact_repo: ArtifactRepository):
        self.volume_repo = volume_repo
        self.artifact_repo = artifact_repo

    def compare_masking(
        self, data_dir: Optional[Path], output_dir: Optional[Path], cfg: RunConfig
    ) -> Tuple[ComparisonResult, Path]:
        named = load_volume_set(self.volume_repo, data_dir, cfg)
        result = compare_masking(
            named,
            cfg.tvm,
            cfg.mask,
            cfg.experiment,
            train_cfg=cfg.train,
            seed=cfg.mask.seed,
            threads=cfg.threads or 1,
        )
        output_dir = self.artifact_repo.output_dir_for(output_dir, "compare-masking")
        self.artifact_repo.write_table(result.rows, output_dir / STATS_FILE)
        self.artifact_repo.write_table(summarize(result.rows), output_dir / SUMMARY_FILE)
        for stem, image in sorted(result.renders.items()):
            self.artifact_repo.save_image(image, output_dir / RENDER_DIR / f"{stem}.png")
        logger.info(f"compare-masking results written to {output_dir}", extra={"path": str(output_dir)})
        return result, output_dir

    def sensitivity(
        self, data_dir: Optional[Path], output_dir: Optional[Path], cfg: RunConfig
    ) -> Tuple[List[SensitivityRow], Path]:
        named = load_volume_set(self.volume_repo, data_dir, cfg)
        rows = sensitivity_sweep(
            named,
            cfg.tvm,
            cfg.mask,
            cfg.experiment.alphas,
            cfg.experiment.betas,
            cfg.experiment.n_seeds,
            seed=cfg.mask.seed,
            threads=cfg.threads or 1,
        )
        output_dir = self.artifact_repo.output_dir_for(output_dir, "sensitivity")
        self.artifact_repo.write_table(rows, output_dir / SENSITIVITY_FILE)
        return rows, output_dir
