"""
Config subcommand: config dump.
"""
import argparse
import json

from atmask.core.dependencies import get_config_controller
from atmask.routers.common import resolve_config


def register(subparsers, parents) -> None:
    p = subparsers.add_parser("config", help="inspect the effective run configuration")
    actions = p.add_subparsers(dest="config_action", metavar="ACTION")
    actions.required = True
    dump = actions.add_parser("dump", parents=parents, help="write defaults + file + flags as JSON")
    dump.add_argument("--output", default=None, help="target file (stdout when omitted)")
    dump.set_defaults(handler=handle_dump)


def handle_dump(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    if args.output is None:
        print(json.dumps(cfg.model_dump(mode="json"), sort_keys=True, indent=2))
    else:
        print(f"config={get_config_controller().dump(cfg, args.output)}")
    return 0
