"""
Mask subcommand.
"""
import argparse

from atmask.core.dependencies import get_mask_controller
from atmask.controllers.mask_controller import stats_line
from atmask.routers.common import (
    add_mask_flags,
    add_tvm_flags,
    mask_overrides,
    merge,
    resolve_config,
    tvm_overrides,
)


def register(subparsers, parents) -> None:
    p = subparsers.add_parser("mask", parents=parents, help="generate a texture-guided patch mask")
    p.add_argument("--volume", required=True, help="input volume")
    p.add_argument("--tvm", default=None, help="precomputed variation map (computed when omitted)")
    p.add_argument("--output", required=True, help="patch mask file (.pmask)")
    p.add_argument("--voxel-output", default=None, help="voxel mask path (default <stem>_voxels.raw)")
    p.add_argument("--pad-to-patch", action="store_true",
                   help="zero-pad the grid to a multiple of the patch size")
    add_mask_flags(p)
    add_tvm_flags(p)
    p.set_defaults(handler=handle_mask)


def handle_mask(args: argparse.Namespace) -> int:
    cfg = resolve_config(args, merge(tvm_overrides(args), mask_overrides(args)))
    pm, report = get_mask_controller().generate(
        args.volume,
        args.output,
        cfg.mask,
        cfg.tvm,
        tvm_path=args.tvm,
        voxel_output=args.voxel_output,
        pad=args.pad_to_patch,
        threads=cfg.threads,
    )
    print(stats_line(pm, report.n_patches))
    return 0
