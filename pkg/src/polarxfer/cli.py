"""``xfer``: batch front-end for transfer-efficiency sweeps.

Subcommands:
  xfer run <config>                 execute the configured sweep
  xfer point <config> [--override section.key=value ...]   single point, JSON to stdout
  xfer check <config>               validate the configuration only

Exit codes: 0 success, 1 one or more grid points failed, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import ConfigError, apply_overrides, parse_config
from .sweeps import run_single_point, run_sweep


def _load(path: str, overrides: list[str]):
    text = Path(path).read_text(encoding="utf-8")
    if overrides:
        text = apply_overrides(text, overrides)
    return parse_config(text)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="xfer", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute the sweep described by the config")
    p_run.add_argument("config")
    p_run.add_argument("--output", help="output path prefix (defaults to [sweep] output)")
    p_run.add_argument("--engine", choices=("rate", "redfield", "both"),
                       help="override the [sweep] engine")
    p_run.add_argument("-q", "--quiet", action="store_true", help="suppress per-point log lines")

    p_point = sub.add_parser("point", help="solve a single point and print the JSON report")
    p_point.add_argument("config")
    p_point.add_argument("--override", action="append", default=[], metavar="SECTION.KEY=VALUE")
    p_point.add_argument("--engine", choices=("rate", "redfield", "both"))
    p_point.add_argument("--output", help="also write CSV/manifest/report files to this prefix")

    p_check = sub.add_parser("check", help="validate the config and echo resolved values")
    p_check.add_argument("config")

    args = parser.parse_args(argv)
    overrides = list(getattr(args, "override", []))
    if getattr(args, "engine", None):
        overrides.append(f"sweep.engine={args.engine}")

    try:
        cfg = _load(args.config, overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return 2

    if args.command == "check":
        json.dump(cfg.to_dict(), sys.stdout, indent=2, sort_keys=True)
        print()
        return 0

    logging.basicConfig(format="%(message)s",
                        level=logging.WARNING if getattr(args, "quiet", False) else logging.INFO)

    if args.command == "point":
        result, report = run_single_point(cfg, args.output or cfg.sweep.output)
        json.dump(report, sys.stdout, indent=2, sort_keys=True)
        print()
        return 0 if result.n_failed == 0 else 1

    try:
        result = run_sweep(cfg, args.output)
    except Exception as exc:
        print(f"sweep aborted: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {result.csv_path} and {result.manifest_path} "
          f"({result.n_points} points, {result.n_failed} failed)")
    return 0 if result.n_failed == 0 else 1


if __name__ == "__main__":
    raise SystemExit(main())
