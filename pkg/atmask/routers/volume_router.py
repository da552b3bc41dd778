"""
Volume subcommands: preprocess, phantom.
"""
import argparse

from atmask.core.dependencies import get_volume_controller
from atmask.schemas import Normalization, PhantomKind
from atmask.routers.common import resolve_config


def register(subparsers, parents) -> None:
    p = subparsers.add_parser("preprocess", parents=parents, help="HU clip, normalize and resample a volume")
    p.add_argument("--input", required=True, help="input volume (.nii or .raw)")
    p.add_argument("--output", required=True, help="output volume (.nii or .raw)")
    p.add_argument("--hu-lo", type=float, default=None, help="HU window low end (default -1000)")
    p.add_argument("--hu-hi", type=float, default=None, help="HU window high end (default 500)")
    p.add_argument("--normalization", choices=[n.value for n in Normalization], default=None)
    p.add_argument("--target-spacing", type=float, default=None, help="isotropic spacing in mm (default 0.5)")
    p.add_argument("--no-resample", action="store_true", help="skip isotropic resampling")
    p.set_defaults(handler=handle_preprocess)

    p = subparsers.add_parser("phantom", parents=parents, help="write a synthetic phantom and its label")
    p.add_argument("--output", required=True, help="output volume; the label goes to <stem>_label<suffix>")
    p.add_argument("--label-output", default=None, help="explicit label path")
    p.add_argument("--kind", choices=[k.value for k in PhantomKind], default=None)
    p.add_argument("--dims", type=int, nargs=3, default=None, metavar=("D0", "D1", "D2"))
    p.add_argument("--spacing", type=float, nargs=3, default=None, metavar=("S0", "S1", "S2"))
    p.add_argument("--center", type=float, nargs=3, default=None, metavar=("C0", "C1", "C2"))
    p.add_argument("--radius", type=float, default=None, help="sphere / tube radius in voxels")
    p.add_argument("--axis", type=int, choices=[0, 1, 2], default=None, help="tube axis")
    p.add_argument("--background", type=float, default=None)
    p.add_argument("--foreground", type=float, default=None)
    p.add_argument("--noise", type=float, default=None, help="uniform noise amplitude")
    p.set_defaults(handler=handle_phantom)


def handle_preprocess(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    window = list(cfg.preprocess.hu_window)
    if args.hu_lo is not None:
        window[0] = args.hu_lo
    if args.hu_hi is not None:
        window[1] = args.hu_hi
    cfg = resolve_config(args, {"preprocess": {
        "hu_window": window,
        "normalization": args.normalization,
        "target_spacing": args.target_spacing,
    }})
    if args.no_resample:
        cfg = cfg.model_copy(update={"preprocess": cfg.preprocess.model_copy(update={"target_spacing": None})})
    result = get_volume_controller().preprocess(args.input, args.output, cfg.preprocess)
    print(f"dims={'x'.join(map(str, result.dims))}\tspacing={','.join(f'{s:g}' for s in result.spacing)}")
    return 0


def handle_phantom(args: argparse.Namespace) -> int:
    cfg = resolve_config(args, {"phantom": {
        "kind": args.kind,
        "dims": args.dims,
        "spacing": args.spacing,
        "center": args.center,
        "radius": args.radius,
        "axis": args.axis,
        "background": args.background,
        "foreground": args.foreground,
        "noise_amplitude": args.noise,
    }})
    volume_file, label_file = get_volume_controller().phantom(cfg.phantom, args.output, args.label_output)
    print(f"volume={volume_file}\tlabel={label_file}")
    return 0
