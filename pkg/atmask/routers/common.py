"""
Shared command-line plumbing: common flags, config resolution and the
flag groups reused by several subcommands.
"""
import argparse
from pathlib import Path
from typing import Any, Dict, Optional

from atmask.core.dependencies import get_config_controller
from atmask.schemas import (
    NormalizationScope,
    PartialGroupMode,
    RemainderPool,
    RunConfig,
    ThresholdMode,
)

Overrides = Dict[str, Dict[str, Any]]


def common_parser() -> argparse.ArgumentParser:
    """Flags accepted by every subcommand."""
    parser = argparse.ArgumentParser(add_help=False)
    group = parser.add_argument_group("common options")
    group.add_argument("--config", type=Path, default=None, help="JSON run config file")
    group.add_argument("--seed", type=int, default=None, help="global seed (env ATMASK_SEED)")
    group.add_argument("--threads", type=int, default=None, help="worker threads (env ATMASK_THREADS)")
    group.add_argument("--log-level", default=None, choices=["DEBUG", "INFO", "WARNING", "ERROR"],
                       help="console log level (env ATMASK_LOG_LEVEL)")
    return parser


def resolve_config(args: argparse.Namespace, overrides: Optional[Overrides] = None) -> RunConfig:
    return get_config_controller().resolve(
        config_path=args.config,
        seed=args.seed,
        threads=args.threads,
        overrides=overrides,
    )


def merge(*parts: Overrides) -> Overrides:
    merged: Overrides = {}
    for part in parts:
        for section, updates in part.items():
            merged.setdefault(section, {}).update(updates)
    return merged


def _values(enum_cls):
    return [member.value for member in enum_cls]


# ============================================
# TEXTURE FLAGS
# ============================================

def add_tvm_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("texture-variation map")
    group.add_argument("--alpha", type=float, default=None, help="gradient weight in [0, 1] (default 0.6)")
    group.add_argument("--stride", type=int, default=None, help="slice-group size s (default 4)")
    group.add_argument("--window", type=int, default=None, help="odd variance window w (default 5)")
    group.add_argument("--sigma", type=float, default=None, help="Gaussian sigma in voxels (default 1.0)")
    group.add_argument("--partial-group", choices=_values(PartialGroupMode), default=None,
                       help="trailing partial slice group handling")
    group.add_argument("--normalization-scope", choices=_values(NormalizationScope), default=None,
                       help="min-max normalize cues per slice or over the volume")


def tvm_overrides(args: argparse.Namespace) -> Overrides:
    return {"tvm": {
        "alpha": args.alpha,
        "stride_s": args.stride,
        "var_window_w": args.window,
        "gaussian_sigma": args.sigma,
        "partial_group_mode": args.partial_group,
        "normalization_scope": args.normalization_scope,
    }}


# ============================================
# MASK FLAGS
# ============================================

def add_mask_flags(parser: argparse.ArgumentParser, with_ratio: bool = True) -> None:
    group = parser.add_argument_group("masking")
    group.add_argument("--patch-size", type=int, default=None, help="cubic patch edge in voxels (default 16)")
    if with_ratio:
        group.add_argument("--ratio", type=float, default=None, help="masking ratio r (default 0.75)")
        group.add_argument("--beta", type=float, default=None, help="high-variation share beta (default 0.65)")
    group.add_argument("--tau", type=float, default=None, help="high-variation threshold (default 0.5)")
    group.add_argument("--threshold-mode", choices=_values(ThresholdMode), default=None,
                       help="tau is a fixed score or a quantile of the patch scores")
    group.add_argument("--remainder-pool", choices=_values(RemainderPool), default=None,
                       help="pool for the non-high-variation masks")


def mask_overrides(args: argparse.Namespace) -> Overrides:
    updates = {
        "patch_size": args.patch_size,
        "threshold_tau": args.tau,
        "threshold_mode": args.threshold_mode,
        "remainder_pool": args.remainder_pool,
    }
    if hasattr(args, "ratio"):
        updates["mask_ratio_r"] = args.ratio
        updates["high_var_fraction_beta"] = args.beta
    return {"mask": updates}


def float_list(text: str):
    """Comma-separated floats: ``0.5,0.75``."""
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'")
