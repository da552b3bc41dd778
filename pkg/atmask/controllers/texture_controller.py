"""
Texture controller: variation maps.
"""
import logging
from pathlib import Path
from typing import Optional

from atmask.repositories import ArtifactRepository, VolumeRepository
from atmask.schemas import TvmConfig, VariationMap, Volume3D
from atmask.services.rendering import render_variation_map
from atmask.services.texture_map import compute_variation_map

logger = logging.getLogger(__name__)


class TextureController:
    """Controller for texture-variation map computation."""

    def __init__(self, volume_repo: VolumeRepository, artifact_repo: ArtifactRepository):
        self.volume_repo = volume_repo
        self.artifact_repo = artifact_repo

    def variation_map(
        self,
        input_path: Path,
        output_path: Path,
        cfg: TvmConfig,
        threads: int = 1,
        render_path: Optional[Path] = None,
        render_scale: int = 1,
    ) -> VariationMap:
        volume = self.volume_repo.load(input_path)
        tvm = compute_variation_map(volume, cfg, threads)
        self.volume_repo.save(Volume3D(data=tvm.data, spacing=volume.spacing), output_path)
        if render_path is not None:
            self.artifact_repo.save_image(render_variation_map(tvm, scale=render_scale), render_path)
        logger.info(
            f"Variation map of {input_path} written to {output_path}",
            extra={"path": str(output_path)},
        )
        return tvm
