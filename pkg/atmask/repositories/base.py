"""
Base repository with common file-system operations.
"""
import logging
from pathlib import Path
from typing import Optional, Union

from atmask.config.settings import get_settings

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class BaseRepository:
    """Base class for all repositories: relative paths resolve against ``root``."""

    def __init__(self, root: Optional[PathLike] = None):
        self.settings = get_settings()
        self.root = Path(root) if root is not None else Path.cwd()

    def resolve(self, path: PathLike) -> Path:
        path = Path(path)
        return path if path.is_absolute() else self.root / path

    def prepare(self, path: PathLike) -> Path:
        """Resolve ``path`` and create its parent directory."""
        target = self.resolve(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        return target

    def output_path(self, name: PathLike) -> Path:
        """Path under the configured output directory (ATMASK_OUTPUT_DIR)."""
        return self.resolve(Path(self.settings.output_dir) / name)

    def output_dir_for(self, requested: Optional[PathLike], name: str) -> Path:
        """``requested`` when given, otherwise ``<output_dir>/<name>``."""
        return self.resolve(requested) if requested is not None else self.output_path(name)
