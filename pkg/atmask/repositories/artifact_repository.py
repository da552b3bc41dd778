"""
Artifact repository: patch masks, toy-model weights, TSV tables, run
configs and rendered images.

Every writer is deterministic (sorted JSON keys, fixed float formatting)
so repeated runs with the same seed produce identical files.
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from PIL import Image
from pydantic import BaseModel, ValidationError

from atmask.repositories.base import BaseRepository, PathLike
from atmask.schemas import PARAM_NAMES, PatchMask, RunConfig, ToyMaeModel
from atmask.schemas.common import Dims3
from atmask.utils.exceptions import ConfigError, VolumeFormatError

logger = logging.getLogger(__name__)


def _sidecar(path: Path) -> Path:
    return path.with_name(path.name + ".json")


def _write_json(path: Path, payload: Dict[str, Any]) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _read_json(path: Path) -> Dict[str, Any]:
    if not path.exists():
        raise VolumeFormatError(path, "header", "missing header")
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise VolumeFormatError(path, "header", f"malformed header: {e}")
    if not isinstance(payload, dict):
        raise VolumeFormatError(path, "header", "malformed header: expected an object")
    return payload


def format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


class ArtifactRepository(BaseRepository):
    """Persistence for everything that is not a Volume3D."""

    # ============================================
    # PATCH MASKS
    # ============================================

    def save_patch_mask(
        self,
        pm: PatchMask,
        path: PathLike,
        patch_size: int,
        original_dims: Optional[Dims3] = None,
    ) -> Path:
        """One byte per patch (0/1, axis-0-major) plus a JSON header."""
        target = self.prepare(path)
        target.write_bytes(pm.bits.astype(np.uint8).tobytes())
        _write_json(_sidecar(target), {
            "grid_dims": list(pm.grid_dims),
            "patch_size": patch_size,
            "m": pm.m,
            "m_h": pm.m_h,
            "m_r": pm.m_r,
            "tau": pm.tau,
            "n_high": pm.n_high,
            "seed": pm.seed,
            "original_dims": list(original_dims) if original_dims is not None else None,
        })
        return target

    def load_patch_mask(self, path: PathLike) -> Tuple[PatchMask, Dict[str, Any]]:
        """Returns the mask and its raw header (patch_size, original_dims, ...)."""
        target = self.resolve(path)
        header = _read_json(_sidecar(target))
        payload = np.frombuffer(target.read_bytes(), dtype=np.uint8)
        try:
            grid_dims = tuple(header["grid_dims"])
            if payload.size != int(np.prod(grid_dims)):
                raise VolumeFormatError(target, "grid_dims", "dims/byte-count mismatch")
            pm = PatchMask(
                grid_dims=grid_dims,
                bits=payload.astype(bool),
                m=header["m"],
                m_h=header["m_h"],
                m_r=header["m_r"],
                tau=header.get("tau", 0.5),
                n_high=header.get("n_high", 0),
                seed=header.get("seed", 0),
            )
        except (KeyError, ValidationError) as e:
            raise VolumeFormatError(target, "header", f"malformed patch-mask header: {e}")
        return pm, header

    # ============================================
    # MODEL WEIGHTS
    # ============================================

    def save_model(self, model: ToyMaeModel, path: PathLike) -> Path:
        """float32 blob (w_enc, b_enc, w_dec, b_dec, mask_token) plus a JSON header."""
        target = self.prepare(path)
        params = model.params()
        blob = b"".join(params[name].astype("<f4").tobytes(order="C") for name in PARAM_NAMES)
        target.write_bytes(blob)
        _write_json(_sidecar(target), {
            "patch_size": model.patch_size,
            "embed_dim": model.embed_dim,
            "dtype": "float32",
            "order": list(PARAM_NAMES),
            "shapes": {name: list(params[name].shape) for name in PARAM_NAMES},
        })
        return target

    def load_model(self, path: PathLike) -> ToyMaeModel:
        target = self.resolve(path)
        header = _read_json(_sidecar(target))
        try:
            patch_size, embed_dim = int(header["patch_size"]), int(header["embed_dim"])
        except (KeyError, TypeError, ValueError) as e:
            raise VolumeFormatError(target, "header", f"malformed weights header: {e}")
        p = patch_size ** 3
        shapes = {
            "w_enc": (p, embed_dim),
            "b_enc": (embed_dim,),
            "w_dec": (embed_dim, p),
            "b_dec": (p,),
            "mask_token": (p,),
        }
        flat = np.frombuffer(target.read_bytes(), dtype="<f4")
        expected = sum(int(np.prod(s)) for s in shapes.values())
        if flat.size != expected:
            raise VolumeFormatError(
                target, "shapes", f"dims/byte-count mismatch: expected {expected} floats, got {flat.size}"
            )
        params, offset = {}, 0
        for name in PARAM_NAMES:
            size = int(np.prod(shapes[name]))
            params[name] = flat[offset:offset + size].reshape(shapes[name])
            offset += size
        return ToyMaeModel(patch_size=patch_size, embed_dim=embed_dim, **params)

    # ============================================
    # TABLES
    # ============================================

    def write_table(self, rows: Sequence[Any], path: PathLike, columns: Optional[List[str]] = None) -> Path:
        """Tab-separated table with a header row; rows are models or dicts."""
        records = [row.model_dump() if isinstance(row, BaseModel) else dict(row) for row in rows]
        if columns is None:
            columns = list(records[0].keys()) if records else []
        lines = ["\t".join(columns)]
        lines.extend("\t".join(format_cell(record.get(c)) for c in columns) for record in records)
        target = self.prepare(path)
        target.write_text("\n".join(lines) + "\n", encoding="utf-8")
        logger.debug(f"Wrote {len(records)} row(s) to {target}", extra={"path": str(target)})
        return target

    def write_loss_trace(self, trace: Iterable[float], path: PathLike) -> Path:
        rows = [{"step": i, "loss": repr(float(loss))} for i, loss in enumerate(trace)]
        return self.write_table(rows, path, columns=["step", "loss"])

    def read_table(self, path: PathLike) -> List[Dict[str, str]]:
        lines = self.resolve(path).read_text(encoding="utf-8").splitlines()
        if not lines:
            return []
        header = lines[0].split("\t")
        return [dict(zip(header, line.split("\t"))) for line in lines[1:]]

    # ============================================
    # RUN CONFIG
    # ============================================

    def dump_run_config(self, config: RunConfig, path: PathLike) -> Path:
        target = self.prepare(path)
        _write_json(target, config.model_dump(mode="json"))
        return target

    def load_run_config(self, path: PathLike) -> RunConfig:
        """Parse a JSON run config; unknown keys and invalid values raise ConfigError."""
        target = self.resolve(path)
        if not target.exists():
            raise ConfigError(f"config file not found: {target}")
        try:
            return RunConfig.model_validate_json(target.read_text(encoding="utf-8"))
        except ValidationError as e:
            raise ConfigError(f"invalid config {target}: {_first_error(e)}")

    # ============================================
    # IMAGES
    # ============================================

    def save_image(self, image: Image.Image, path: PathLike) -> Path:
        target = self.prepare(path)
        image.save(target, format="PNG")
        return target


def _first_error(e: ValidationError) -> str:
    err = e.errors()[0]
    location = ".".join(str(part) for part in err.get("loc", ()))
    return f"{location}: {err.get('msg')}" if location else str(err.get("msg"))
