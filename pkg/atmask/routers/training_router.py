"""
Training subcommand: pretrain-toy.
"""
import argparse
from pathlib import Path

from atmask.core.dependencies import get_training_controller
from atmask.schemas import LrSchedule, MaskInputMode, OptimizerKind
from atmask.routers.common import (
    add_mask_flags,
    add_tvm_flags,
    mask_overrides,
    merge,
    resolve_config,
    tvm_overrides,
)

ADAMW_DEFAULT_LR = 1.5e-4


def register(subparsers, parents) -> None:
    p = subparsers.add_parser("pretrain-toy", parents=parents, help="pretrain the toy masked autoencoder")
    p.add_argument("--data-dir", type=Path, default=None,
                   help="directory of volumes (default: the standard phantom set)")
    p.add_argument("--output-dir", type=Path, default=None,
                   help="where the loss trace and weights go (default: <ATMASK_OUTPUT_DIR>/pretrain-toy)")
    p.add_argument("--steps", type=int, default=None, help="optimizer steps (default 200)")
    p.add_argument("--lr", type=float, default=None, help="learning rate (default 1e-2, 1.5e-4 for adamw)")
    p.add_argument("--optimizer", choices=[o.value for o in OptimizerKind], default=None)
    p.add_argument("--schedule", choices=[s.value for s in LrSchedule], default=None)
    p.add_argument("--warmup-steps", type=int, default=None)
    p.add_argument("--embed-dim", type=int, default=None)
    p.add_argument("--input-mode", choices=[m.value for m in MaskInputMode], default=None)
    add_mask_flags(p)
    add_tvm_flags(p)
    p.set_defaults(handler=handle_pretrain)


def handle_pretrain(args: argparse.Namespace) -> int:
    lr = args.lr
    if lr is None and args.optimizer == OptimizerKind.ADAMW.value:
        lr = ADAMW_DEFAULT_LR
    train = {
        "steps": args.steps,
        "learning_rate": lr,
        "optimizer": args.optimizer,
        "schedule": args.schedule,
        "warmup_steps": args.warmup_steps,
        "embed_dim": args.embed_dim,
        "input_mode": args.input_mode,
    }
    cfg = resolve_config(args, merge(tvm_overrides(args), mask_overrides(args), {"train": train}))
    result, _ = get_training_controller().pretrain(args.data_dir, args.output_dir, cfg)
    if result.loss_trace:
        print(f"steps={len(result.loss_trace)}\tinitial_loss={result.initial_loss!r}\tfinal_loss={result.final_loss!r}")
    else:
        print("steps=0")
    return 0
