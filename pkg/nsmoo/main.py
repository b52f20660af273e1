# nsmoo/main.py
"""
Command-line entry point
  python -m nsmoo {solve,cover,scalarize,path,infer} --config run.toml [--seed N] [--out DIR]
  python -m nsmoo problems list
"""
import argparse
import logging
import sys
from typing import Any, Dict, List, Optional

import pandas as pd

from nsmoo import __version__
from nsmoo.commands.base_command import EXIT_CONFIG
from nsmoo.commands.command_registry import CommandRegistry
from nsmoo.core.config import RunConfig, load_config
from nsmoo.core.errors import ConfigError
from nsmoo.core.utils import get_env_value

logger = logging.getLogger(__name__)

RUN_COMMANDS = ["solve", "cover", "scalarize", "path", "infer"]


def configure_logging() -> None:
    level = get_env_value("NSMOO_LOG_LEVEL", "INFO").upper()
    logging.basicConfig(level=getattr(logging, level, logging.INFO),
                        format="%(levelname)s %(name)s: %(message)s")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nsmoo", description="Non-smooth multiobjective optimization toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in RUN_COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} workflow")
        p.add_argument("--config", required=True, help="TOML run configuration")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", default=None, help="output directory (overrides config and NSMOO_OUTPUT_DIR)")
    problems = sub.add_parser("problems", help="inspect the problem catalog")
    problems.add_argument("action", choices=["list"])
    return parser


def _print_result(name: str, result: Dict[str, Any]) -> None:
    data = result.get("data") or {}
    if name == "problems":
        print("📚 Built-in problems:")
        for entry in data.get("problems", []):
            print(f"   {entry['name']:<16} {entry['description']}")
            print(f"   {'':<16} defaults: {entry['defaults']}")
        return
    if name == "infer" and "residuals" in data:
        print(f"s = {data['smallest_singular']:.6e} (null space dimension {data['null_dim']})")
        print(data["residuals"].to_string(index=False))
    for key, value in data.items():
        if isinstance(value, pd.DataFrame) or key in ("smallest_singular", "null_dim"):
            continue
        print(f"   {key}: {value}")
    for path in result.get("artifacts", []):
        print(f"💾 {path}")
    if result.get("error"):
        print(f"❌ {result['error']}", file=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    configure_logging()
    args = build_parser().parse_args(argv)
    registry = CommandRegistry()

    if args.command == "problems":
        cfg = RunConfig()
    else:
        try:
            cfg = load_config(args.config).with_overrides(seed=args.seed, output_dir=args.out)
        except ConfigError as e:
            print(f"❌ {args.config}: {e}", file=sys.stderr)
            return EXIT_CONFIG

    result = registry.execute_command(args.command, cfg)
    _print_result(args.command, result)
    return int(result["exit_code"])


if __name__ == "__main__":
    sys.exit(main())
