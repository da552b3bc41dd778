"""
Experiment subcommands: compare-masking, sensitivity.
"""
import argparse
from pathlib import Path

from atmask.core.dependencies import get_experiment_controller
from atmask.routers.common import (
    add_mask_flags,
    add_tvm_flags,
    float_list,
    mask_overrides,
    merge,
    resolve_config,
    tvm_overrides,
)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data-dir", type=Path, default=None,
                   help="directory of volumes (default: the standard phantom set)")
    p.add_argument("--output-dir", type=Path, default=None,
                   help="result directory (default: <ATMASK_OUTPUT_DIR>/<command>)")
    p.add_argument("--betas", type=float_list, default=None, help="comma-separated beta grid")
    p.add_argument("--n-seeds", type=int, default=None, help="seeds per configuration")
    add_mask_flags(p, with_ratio=False)
    add_tvm_flags(p)


def register(subparsers, parents) -> None:
    p = subparsers.add_parser("compare-masking", parents=parents,
                              help="texture-guided vs random masking over seed/ratio/beta grids")
    p.add_argument("--ratios", type=float_list, default=None, help="comma-separated ratio grid")
    p.add_argument("--train-steps", type=int, default=None, help="toy pretraining steps per row (0 = off)")
    p.add_argument("--render-scale", type=int, default=None)
    p.add_argument("--no-render", action="store_true", help="skip slice renders")
    _add_common(p)
    p.set_defaults(handler=handle_compare)

    p = subparsers.add_parser("sensitivity", parents=parents, help="mask coverage over an (alpha, beta) grid")
    p.add_argument("--alphas", type=float_list, default=None, help="comma-separated alpha grid")
    _add_common(p)
    p.set_defaults(handler=handle_sensitivity)


def handle_compare(args: argparse.Namespace) -> int:
    experiment = {
        "ratios": args.ratios,
        "betas": args.betas,
        "n_seeds": args.n_seeds,
        "train_steps": args.train_steps,
        "render_scale": args.render_scale,
        "render": False if args.no_render else None,
    }
    cfg = resolve_config(args, merge(tvm_overrides(args), mask_overrides(args), {"experiment": experiment}))
    result, output_dir = get_experiment_controller().compare_masking(args.data_dir, args.output_dir, cfg)
    print(f"rows={len(result.rows)}\trenders={len(result.renders)}\toutput={output_dir}")
    return 0


def handle_sensitivity(args: argparse.Namespace) -> int:
    experiment = {"alphas": args.alphas, "betas": args.betas, "n_seeds": args.n_seeds}
    cfg = resolve_config(args, merge(tvm_overrides(args), mask_overrides(args), {"experiment": experiment}))
    rows, output_dir = get_experiment_controller().sensitivity(args.data_dir, args.output_dir, cfg)
    print(f"rows={len(rows)}\toutput={output_dir}")
    return 0
