"""
Mask controller: patch scoring, mask generation and persistence.
"""
import logging
from pathlib import Path
from typing import Optional, Tuple

from atmask.repositories import ArtifactRepository, VolumeRepository
from atmask.schemas import CoverageReport, MaskConfig, PatchMask, TvmConfig, VariationMap
from atmask.services.mask_gen import expand_mask, generate_mask, mask_coverage_stats, score_patches
from atmask.services.preprocessing import crop_to_dims, pad_to_patch
from atmask.services.texture_map import compute_variation_map
from atmask.utils.exceptions import DimensionMismatchError

logger = logging.getLogger(__name__)


def voxel_path_for(path: Path) -> Path:
    """``mask.pmask`` -> ``mask_voxels.raw``."""
    return path.with_name(f"{path.stem}_voxels.raw")


def stats_line(pm: PatchMask, n_patches: int) -> str:
    return f"m={pm.m}\tm_h={pm.m_h}\tm_r={pm.m_r}\tn_patches={n_patches}\tn_high={pm.n_high}"


class MaskController:
    """Controller for texture-guided mask generation."""

    def __init__(self, volume_repo: VolumeRepository, artifact_repo: ArtifactRepository):
        self.volume_repo = volume_repo
        self.artifact_repo = artifact_repo

    def _variation_map(self, volume, tvm_path: Optional[Path], tvm_cfg: TvmConfig, threads: int) -> VariationMap:
        if tvm_path is None:
            return compute_variation_map(volume, tvm_cfg, threads)
        stored = self.volume_repo.load(tvm_path)
        if stored.dims != volume.dims:
            raise DimensionMismatchError(volume.dims, stored.dims, what="variation map")
        return VariationMap(data=stored.data, normalized=True)

    def generate(
        self,
        volume_path: Path,
        output_path: Path,
        mask_cfg: MaskConfig,
        tvm_cfg: TvmConfig,
        tvm_path: Optional[Path] = None,
        voxel_output: Optional[Path] = None,
        pad: bool = False,
        threads: int = 1,
    ) -> Tuple[PatchMask, CoverageReport]:
        """
        Score patches, draw the mask, write the patch mask and its voxel
        expansion. With ``pad`` the grid is zero-padded to a multiple of
        the patch size and the voxel mask is cropped back to the input dims.
        """
        volume = self.volume_repo.load(volume_path)
        tvm = self._variation_map(volume, tvm_path, tvm_cfg, threads)
        original_dims = volume.dims
        if pad:
            padded, original_dims = pad_to_patch(volume.with_data(tvm.data), mask_cfg.patch_size)
            tvm = VariationMap(data=padded.data, normalized=tvm.normalized)

        scores = score_patches(tvm, mask_cfg)
        pm = generate_mask(scores, mask_cfg)
        report = mask_coverage_stats(pm, scores)

        self.artifact_repo.save_patch_mask(
            pm, output_path, mask_cfg.patch_size, original_dims if pad else None
        )
        voxels = expand_mask(pm, mask_cfg.patch_size, volume.spacing)
        if pad:
            voxels = crop_to_dims(voxels, original_dims)
        self.volume_repo.save(voxels, voxel_output or voxel_path_for(Path(output_path)))

        logger.info(stats_line(pm, scores.n_patches).replace("\t", " "), extra={"path": str(output_path)})
        return pm, report
