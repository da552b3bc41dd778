"""
Analytic synthetic phantoms with known labels.

Voxel centers sit at integer indices; the default center of an axis of
length d is (d - 1) / 2. A voxel belongs to a structure when its center
lies inside it.
"""
import logging
from typing import List, Tuple

import numpy as np

from atmask.schemas import Phantom, PhantomKind, PhantomSpec, Volume3D
from atmask.utils.exceptions import GeometryError
from atmask.utils.rng import make_rng

logger = logging.getLogger(__name__)


def _center(spec: PhantomSpec) -> Tuple[float, float, float]:
    if spec.center is not None:
        return tuple(float(c) for c in spec.center)
    return tuple((d - 1) / 2.0 for d in spec.dims)


def _check_extent(spec: PhantomSpec, center, axes) -> None:
    for axis in axes:
        lo, hi = center[axis] - spec.radius, center[axis] + spec.radius
        if lo < -0.5 or hi > spec.dims[axis] - 0.5:
            raise GeometryError(
                f"{spec.kind.value} of radius {spec.radius} at {center} leaves the volume "
                f"along axis {axis} (dims {spec.dims})"
            )


def _box(spec: PhantomSpec):
    if spec.box is None:
        lo = tuple(d // 4 for d in spec.dims)
        hi = tuple(l + max(1, d // 2) for l, d in zip(lo, spec.dims))
        return lo, hi
    lo, hi = spec.box
    for axis, (l, h, d) in enumerate(zip(lo, hi, spec.dims)):
        if not 0 <= l < h <= d:
            raise GeometryError(f"box [{l}, {h}) does not fit axis {axis} of length {d}")
    return tuple(lo), tuple(hi)


def sphere_label(spec: PhantomSpec) -> np.ndarray:
    center = _center(spec)
    _check_extent(spec, center, (0, 1, 2))
    z, y, x = np.ogrid[: spec.dims[0], : spec.dims[1], : spec.dims[2]]
    dist2 = (z - center[0]) ** 2 + (y - center[1]) ** 2 + (x - center[2]) ** 2
    return dist2 <= spec.radius ** 2


def tube_label(spec: PhantomSpec) -> np.ndarray:
    """Cylinder of ``radius`` running the full length of ``axis``."""
    center = _center(spec)
    cross = [a for a in range(3) if a != spec.axis]
    _check_extent(spec, center, cross)
    grids = np.ogrid[: spec.dims[0], : spec.dims[1], : spec.dims[2]]
    dist2 = sum((grids[a] - center[a]) ** 2 for a in cross)
    return np.broadcast_to(dist2 <= spec.radius ** 2, spec.dims)


def make_phantom(spec: PhantomSpec) -> Phantom:
    """
    Build the phantom volume and its binary label.

    * sphere_shell: solid ball, intensity step at its surface;
    * tube: cylinder along ``axis``;
    * textured_block: foreground plus uniform noise in [-a, a] inside a box;
    * constant: ``background`` everywhere, empty label.

    For sphere_shell and tube, ``noise_amplitude`` adds uniform noise to
    the whole volume. Identical specs give bit-identical output.
    """
    if any(d < 1 for d in spec.dims):
        raise GeometryError(f"phantom dims must be positive, got {spec.dims}")
    rng = make_rng(spec.seed)
    data = np.full(spec.dims, spec.background, dtype=np.float64)

    if spec.kind == PhantomKind.CONSTANT:
        label = np.zeros(spec.dims, dtype=bool)
    elif spec.kind == PhantomKind.TEXTURED_BLOCK:
        (l0, l1, l2), (h0, h1, h2) = _box(spec)
        label = np.zeros(spec.dims, dtype=bool)
        label[l0:h0, l1:h1, l2:h2] = True
        noise = rng.uniform(-spec.noise_amplitude, spec.noise_amplitude, size=(h0 - l0, h1 - l1, h2 - l2))
        data[l0:h0, l1:h1, l2:h2] = spec.foreground + noise
    else:
        label = sphere_label(spec) if spec.kind == PhantomKind.SPHERE_SHELL else tube_label(spec)
        data[label] = spec.foreground
        if spec.noise_amplitude > 0:
            data += rng.uniform(-spec.noise_amplitude, spec.noise_amplitude, size=spec.dims)

    logger.debug(f"Phantom {spec.kind.value}: dims={spec.dims}, label voxels={int(label.sum())}")
    return Phantom(
        volume=Volume3D(data=data, spacing=spec.spacing),
        label=Volume3D(data=label.astype(np.float32), spacing=spec.spacing),
    )


STANDARD_KINDS = (PhantomKind.SPHERE_SHELL, PhantomKind.TUBE, PhantomKind.TEXTURED_BLOCK)


def standard_phantoms(spec: PhantomSpec, texture_amplitude: float = 0.25) -> List[Tuple[str, Phantom]]:
    """
    The default experiment set: one phantom per textured kind, sharing
    dims, spacing, radius and seed with ``spec``.
    """
    phantoms = []
    for kind in STANDARD_KINDS:
        update = {"kind": kind}
        if kind == PhantomKind.TEXTURED_BLOCK:
            update["noise_amplitude"] = spec.noise_amplitude or texture_amplitude
        phantoms.append((kind.value, make_phantom(spec.model_copy(update=update))))
    return phantoms
