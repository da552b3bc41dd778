"""
Metrics subcommand: eval-metrics.
"""
import argparse

from atmask.core.dependencies import get_metrics_controller
from atmask.repositories.artifact_repository import format_cell

REPORT_COLUMNS = ("dsc", "iou", "hd95", "hd95_defined", "tp", "t", "p")


def register(subparsers, parents) -> None:
    p = subparsers.add_parser("eval-metrics", parents=parents, help="DSC / IoU / HD95 of a binary pair")
    p.add_argument("--pred", required=True, help="predicted binary volume")
    p.add_argument("--gt", required=True, help="ground-truth binary volume")
    p.add_argument("--spacing", type=float, nargs=3, default=None, metavar=("S0", "S1", "S2"),
                   help="override voxel spacing in mm")
    p.set_defaults(handler=handle_eval)


def handle_eval(args: argparse.Namespace) -> int:
    spacing = tuple(args.spacing) if args.spacing is not None else None
    report = get_metrics_controller().evaluate(args.pred, args.gt, spacing)
    values = report.model_dump()
    print("\t".join(REPORT_COLUMNS))
    print("\t".join(format_cell(values[c]) for c in REPORT_COLUMNS))
    return 0
