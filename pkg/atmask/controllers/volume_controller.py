"""
Volume controller: preprocessing and phantom generation.
"""
import logging
from pathlib import Path
from typing import Optional, Tuple

from atmask.repositories import VolumeRepository
from atmask.schemas import PhantomSpec, PreprocessConfig, Volume3D
from atmask.services.phantom import make_phantom
from atmask.services.preprocessing import run_preprocessing

logger = logging.getLogger(__name__)


def label_path_for(path: Path) -> Path:
    """``phantom.nii`` -> ``phantom_label.nii``; ``phantom.raw`` -> ``phantom_label.raw``."""
    return path.with_name(f"{path.stem}_label{path.suffix}")


class VolumeController:
    """Controller for volume-level operations."""

    def __init__(self, volume_repo: VolumeRepository):
        self.volume_repo = volume_repo

    def preprocess(self, input_path: Path, output_path: Path, cfg: PreprocessConfig) -> Volume3D:
        """Clip, normalize and (optionally) resample one volume file."""
        volume = self.volume_repo.load(input_path)
        result = run_preprocessing(volume, cfg)
        self.volume_repo.save(result, output_path)
        logger.info(
            f"Preprocessed {input_path} {volume.dims} -> {output_path} {result.dims}",
            extra={"path": str(output_path)},
        )
        return result

    def phantom(
        self, spec: PhantomSpec, output_path: Path, label_path: Optional[Path] = None
    ) -> Tuple[Path, Path]:
        """Write a phantom volume and its label next to it."""
        phantom = make_phantom(spec)
        label_path = label_path or label_path_for(Path(output_path))
        volume_file = self.volume_repo.save(phantom.volume, output_path)
        label_file = self.volume_repo.save(phantom.label, label_path)
        logger.info(f"Phantom {spec.kind.value} written to {volume_file}", extra={"path": str(volume_file)})
        return volume_file, label_file
