"""
Volume repository: bit-exact persistence of Volume3D.

Two formats are supported:

* raw: little-endian payload in axis-0-major order plus a JSON sidecar
  ``<file>.json`` with keys ``dims``, ``dtype`` and ``spacing``;
* NIfTI-1: uncompressed single-file ``.nii`` with scalar int16, uint16
  or float32 data. ``vox_offset`` is honored and ``scl_slope`` /
  ``scl_inter`` are applied when the slope is nonzero. NIfTI dim[1] maps
  to axis 0 of the volume.

Anything else is rejected with a VolumeFormatError naming the file and
the offending header field.
"""
import json
import logging
from pathlib import Path
from typing import Dict, List, Tuple

import numpy as np

from atmask.schemas import Volume3D
from atmask.repositories.base import BaseRepository, PathLike
from atmask.utils.exceptions import NonFiniteVolumeError, VolumeFormatError

logger = logging.getLogger(__name__)


RAW_DTYPES: Dict[str, str] = {"int16": "<i2", "uint16": "<u2", "float32": "<f4"}
NIFTI_DTYPES: Dict[int, Tuple[str, int]] = {4: ("i2", 16), 512: ("u2", 16), 16: ("f4", 32)}
NIFTI_HEADER_SIZE = 348
NIFTI_VOX_OFFSET = 352

NIFTI_HEADER = np.dtype([
    ("sizeof_hdr", "i4"), ("data_type", "S10"), ("db_name", "S18"),
    ("extents", "i4"), ("session_error", "i2"), ("regular", "S1"), ("dim_info", "u1"),
    ("dim", "i2", (8,)), ("intent_p1", "f4"), ("intent_p2", "f4"), ("intent_p3", "f4"),
    ("intent_code", "i2"), ("datatype", "i2"), ("bitpix", "i2"), ("slice_start", "i2"),
    ("pixdim", "f4", (8,)), ("vox_offset", "f4"), ("scl_slope", "f4"), ("scl_inter", "f4"),
    ("slice_end", "i2"), ("slice_code", "u1"), ("xyzt_units", "u1"),
    ("cal_max", "f4"), ("cal_min", "f4"), ("slice_duration", "f4"), ("toffset", "f4"),
    ("glmax", "i4"), ("glmin", "i4"), ("descrip", "S80"), ("aux_file", "S24"),
    ("qform_code", "i2"), ("sform_code", "i2"),
    ("quatern_b", "f4"), ("quatern_c", "f4"), ("quatern_d", "f4"),
    ("qoffset_x", "f4"), ("qoffset_y", "f4"), ("qoffset_z", "f4"),
    ("srow_x", "f4", (4,)), ("srow_y", "f4", (4,)), ("srow_z", "f4", (4,)),
    ("intent_name", "S16"), ("magic", "S4"),
])


def is_nifti(path: PathLike) -> bool:
    return str(path).lower().endswith((".nii", ".nii.gz"))


def header_path(path: PathLike) -> Path:
    """Sidecar header path of a raw payload file."""
    path = Path(path)
    return path.with_name(path.name + ".json")


# ============================================
# RAW FORMAT
# ============================================

def _read_raw_header(path: Path) -> Tuple[Tuple[int, int, int], str, Tuple[float, float, float]]:
    sidecar = header_path(path)
    if not sidecar.exists():
        raise VolumeFormatError(path, "header", f"missing sidecar header {sidecar.name}")
    try:
        header = json.loads(sidecar.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise VolumeFormatError(sidecar, "header", f"malformed header: {e}")
    if not isinstance(header, dict):
        raise VolumeFormatError(sidecar, "header", "malformed header: expected an object")

    for key in ("dims", "dtype", "spacing"):
        if key not in header:
            raise VolumeFormatError(sidecar, key, f"malformed header: missing key '{key}'")

    dims = header["dims"]
    if (not isinstance(dims, list) or len(dims) != 3
            or not all(isinstance(d, int) and not isinstance(d, bool) and d > 0 for d in dims)):
        raise VolumeFormatError(sidecar, "dims", f"malformed header: dims must be 3 positive ints, got {dims}")

    dtype = header["dtype"]
    if dtype not in RAW_DTYPES:
        raise VolumeFormatError(sidecar, "dtype", f"unsupported dtype '{dtype}'")

    spacing = header["spacing"]
    if (not isinstance(spacing, list) or len(spacing) != 3
            or not all(isinstance(s, (int, float)) and not isinstance(s, bool) and s > 0 for s in spacing)):
        raise VolumeFormatError(sidecar, "spacing", f"malformed header: spacing must be 3 positive numbers, got {spacing}")

    return tuple(dims), dtype, tuple(float(s) for s in spacing)


def _load_raw(path: Path) -> Volume3D:
    dims, dtype, spacing = _read_raw_header(path)
    payload = path.read_bytes()
    item = np.dtype(RAW_DTYPES[dtype]).itemsize
    expected = int(np.prod(dims)) * item
    if len(payload) != expected:
        raise VolumeFormatError(
            path, "dims",
            f"dims/byte-count mismatch: dims {dims} x {item} bytes = {expected}, payload has {len(payload)}"
        )
    data = np.frombuffer(payload, dtype=RAW_DTYPES[dtype]).reshape(dims)
    return Volume3D(data=data.astype(np.float32), spacing=spacing)


def _save_raw(volume: Volume3D, path: Path) -> None:
    path.write_bytes(volume.data.astype("<f4").tobytes(order="C"))
    header = {
        "dims": list(volume.dims),
        "dtype": "float32",
        "spacing": list(volume.spacing),
    }
    header_path(path).write_text(json.dumps(header, sort_keys=True, indent=2) + "\n", encoding="utf-8")


# ============================================
# NIFTI-1 SUBSET
# ============================================

def _parse_nifti_header(path: Path, blob: bytes) -> Tuple[np.void, str]:
    """Header record and its byte order, detected from sizeof_hdr."""
    if len(blob) < NIFTI_HEADER_SIZE:
        raise VolumeFormatError(path, "sizeof_hdr", f"file too short for a NIfTI-1 header ({len(blob)} bytes)")
    for order in ("<", ">"):
        header = np.frombuffer(blob[:NIFTI_HEADER_SIZE], dtype=NIFTI_HEADER.newbyteorder(order))[0]
        if int(header["sizeof_hdr"]) == NIFTI_HEADER_SIZE:
            return header, order
    raise VolumeFormatError(path, "sizeof_hdr", "malformed header: sizeof_hdr is not 348")


def _load_nifti(path: Path) -> Volume3D:
    if str(path).lower().endswith(".gz"):
        raise VolumeFormatError(path, "compression", "compressed NIfTI is not supported")
    blob = path.read_bytes()
    header, byte_order = _parse_nifti_header(path, blob)

    magic = bytes(header["magic"])
    if magic not in (b"n+1", b"n+1\x00"):
        raise VolumeFormatError(path, "magic", f"unsupported NIfTI magic {magic!r}; only single-file n+1 is read")

    dim = [int(d) for d in header["dim"]]
    ndim = dim[0]
    if ndim < 3 or ndim > 7:
        raise VolumeFormatError(path, "dim", f"expected a 3D volume, dim[0]={ndim}")
    if any(d > 1 for d in dim[4:ndim + 1]):
        raise VolumeFormatError(path, "dim", f"expected a 3D scalar volume, got dim={dim[1:ndim + 1]}")
    dims = tuple(dim[1:4])
    if any(d < 1 for d in dims):
        raise VolumeFormatError(path, "dim", f"non-positive dims {dims}")

    datatype = int(header["datatype"])
    if datatype not in NIFTI_DTYPES:
        raise VolumeFormatError(path, "datatype", f"unsupported dtype code {datatype}")
    code, bitpix = NIFTI_DTYPES[datatype]
    if int(header["bitpix"]) != bitpix:
        raise VolumeFormatError(path, "bitpix", f"bitpix {int(header['bitpix'])} does not match datatype {datatype}")

    pixdim = [float(p) for p in header["pixdim"][1:4]]
    if any(not np.isfinite(p) or p <= 0 for p in pixdim):
        raise VolumeFormatError(path, "pixdim", f"malformed header: spacing must be > 0, got {pixdim}")

    offset = int(header["vox_offset"])
    if offset < NIFTI_HEADER_SIZE:
        offset = NIFTI_VOX_OFFSET
    dtype = np.dtype(byte_order + code)
    count = int(np.prod(dims))
    if len(blob) - offset != count * dtype.itemsize:
        raise VolumeFormatError(
            path, "dim",
            f"dims/byte-count mismatch: dims {dims} need {count * dtype.itemsize} bytes "
            f"after vox_offset {offset}, file has {len(blob) - offset}"
        )

    data = np.frombuffer(blob, dtype=dtype, count=count, offset=offset).reshape(dims, order="F")
    data = data.astype(np.float64)
    slope = float(header["scl_slope"])
    inter = float(header["scl_inter"])
    inter = inter if np.isfinite(inter) else 0.0
    if np.isfinite(slope) and slope != 0.0 and (slope, inter) != (1.0, 0.0):
        data = data * slope + inter
    return Volume3D(data=data.astype(np.float32), spacing=tuple(pixdim))


def _save_nifti(volume: Volume3D, path: Path) -> None:
    header = np.zeros((), dtype=NIFTI_HEADER.newbyteorder("<"))
    header["sizeof_hdr"] = NIFTI_HEADER_SIZE
    header["regular"] = b"r"
    header["dim"] = [3, *volume.dims, 1, 1, 1, 1]
    header["datatype"] = 16
    header["bitpix"] = 32
    header["pixdim"] = [1.0, *volume.spacing, 0.0, 0.0, 0.0, 0.0]
    header["vox_offset"] = NIFTI_VOX_OFFSET
    header["scl_slope"] = 1.0
    header["scl_inter"] = 0.0
    header["xyzt_units"] = 2  # millimeters
    header["sform_code"] = 1
    header["srow_x"] = [volume.spacing[0], 0.0, 0.0, 0.0]
    header["srow_y"] = [0.0, volume.spacing[1], 0.0, 0.0]
    header["srow_z"] = [0.0, 0.0, volume.spacing[2], 0.0]
    header["magic"] = b"n+1"

    with open(path, "wb") as f:
        f.write(header.tobytes())
        f.write(b"\x00" * (NIFTI_VOX_OFFSET - NIFTI_HEADER_SIZE))
        f.write(volume.data.astype("<f4").tobytes(order="F"))


# ============================================
# PUBLIC API
# ============================================

def load_volume(path: PathLike) -> Volume3D:
    """Load a raw or NIfTI-1 volume; data is widened to float32."""
    path = Path(path)
    if not path.exists():
        raise VolumeFormatError(path, "path", "file not found")
    volume = _load_nifti(path) if is_nifti(path) else _load_raw(path)
    logger.debug(f"Loaded volume {path.name}: dims={volume.dims}, spacing={volume.spacing}")
    return volume


def save_volume(volume: Volume3D, path: PathLike) -> None:
    """
    Persist a volume as float32 (NIfTI-1 for ``.nii``, raw + sidecar otherwise).

    Raises NonFiniteVolumeError if any voxel is NaN or Inf.
    """
    path = Path(path)
    bad = int(np.count_nonzero(~np.isfinite(volume.data)))
    if bad:
        raise NonFiniteVolumeError(bad, context=str(path))
    if str(path).lower().endswith(".gz"):
        raise VolumeFormatError(path, "compression", "compressed NIfTI is not supported")
    path.parent.mkdir(parents=True, exist_ok=True)
    if is_nifti(path):
        _save_nifti(volume, path)
    else:
        _save_raw(volume, path)
    logger.debug(f"Saved volume {path.name}: dims={volume.dims}")


class VolumeRepository(BaseRepository):
    """Repository for volume files."""

    SUFFIXES = (".nii", ".raw")

    def load(self, path: PathLike) -> Volume3D:
        return load_volume(self.resolve(path))

    def save(self, volume: Volume3D, path: PathLike) -> Path:
        target = self.resolve(path)
        save_volume(volume, target)
        return target

    def list_volumes(self, directory: PathLike) -> List[Path]:
        """Volume files in ``directory`` (label files excluded), sorted by name."""
        directory = self.resolve(directory)
        if not directory.is_dir():
            raise VolumeFormatError(directory, "path", "not a directory")
        return sorted(
            p for p in directory.iterdir()
            if p.suffix.lower() in self.SUFFIXES and "_label" not in p.stem
        )
