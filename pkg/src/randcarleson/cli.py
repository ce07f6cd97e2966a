"""Command line entry point.

Usage::

    randcarleson list
    randcarleson run CONFIG [--seed N] [--out PATH] [--override key=value]...

Exit status: 0 when the experiment passes its thresholds, 1 when it
runs but fails them, 2 on configuration errors.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .config import ConfigError, parse_config
from .experiments import REGISTRY, run


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="randcarleson",
        description="experiment harness for random modulated maximal operators",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment from a config file")
    p_run.add_argument("config", help="path to a flat key = value config file")
    p_run.add_argument("--seed", type=int, default=None, help="override the seed")
    p_run.add_argument("--out", default=None, help="override the output path")
    p_run.add_argument(
        "--override",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override any config field (repeatable)",
    )

    sub.add_parser("list", help="list the available experiments")
    return parser


def _cmd_list() -> int:
    width = max(len(e.name) for e in REGISTRY)
    for entry in REGISTRY:
        print(f"{entry.name:<{width}}  {entry.description} [{entry.anchor}]")
    return 0


def _cmd_run(args: argparse.Namespace) -> int:
    overrides: dict[str, str] = {}
    for item in args.override:
        if "=" not in item:
            raise ConfigError(f"override must look like key=value, got {item!r}")
        key, val = item.split("=", 1)
        overrides[key.strip()] = val.strip()
    if args.seed is not None:
        overrides["seed"] = str(args.seed)
    if args.out is not None:
        overrides["output_path"] = args.out
    try:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    cfg = parse_config(text, overrides)
    return run(cfg)


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "list":
            return _cmd_list()
        return _cmd_run(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
