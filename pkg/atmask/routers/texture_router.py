"""
Texture subcommand: tvm.
"""
import argparse

from atmask.core.dependencies import get_texture_controller
from atmask.routers.common import add_tvm_flags, resolve_config, tvm_overrides


def register(subparsers, parents) -> None:
    p = subparsers.add_parser("tvm", parents=parents, help="compute the texture-variation map")
    p.add_argument("--input", required=True, help="input volume")
    p.add_argument("--output", required=True, help="output float32 map (.nii or .raw)")
    p.add_argument("--render", default=None, help="also write a PNG of the middle slice")
    p.add_argument("--render-scale", type=int, default=1, help="nearest-neighbour upscale of the render")
    add_tvm_flags(p)
    p.set_defaults(handler=handle_tvm)


def handle_tvm(args: argparse.Namespace) -> int:
    cfg = resolve_config(args, tvm_overrides(args))
    tvm = get_texture_controller().variation_map(
        args.input,
        args.output,
        cfg.tvm,
        threads=cfg.threads,
        render_path=args.render,
        render_scale=args.render_scale,
    )
    print(f"dims={'x'.join(map(str, tvm.dims))}\tmax={float(tvm.data.max()):g}\tmean={float(tvm.data.mean()):.6g}")
    return 0
