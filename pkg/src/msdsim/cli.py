"""Batch command-line front end.

    msdsim list-scenarios
    msdsim run CONFIG.json [--out DIR]
    msdsim run --scenario fig1c [--set grid.steps=10000 ...] [--out DIR]

The output directory falls back to $MSDSIM_OUTDIR, then the config's
output.directory, then the working directory.  Exit code 0 on success,
2 for configuration errors, 1 for runtime failures.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from .backend import backend_name
from .errors import ConfigError, SimulationError
from .scenarios import (
    SCENARIO_DESCRIPTIONS,
    SCENARIOS,
    execute,
    load_config,
    resolve_config,
    set_config_path,
)


def _parse_set(expr: str):
    if "=" not in expr:
        raise ConfigError(f"--set expects key=value, got {expr!r}")
    key, text = expr.split("=", 1)
    try:
        value = json.loads(text)
    except json.JSONDecodeError:
        value = text  # bare strings such as mode=msd
    return key.strip(), value


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="msdsim",
        description="three-level STIRAP / counterdiabatic driving simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute one scenario configuration")
    run.add_argument("config", nargs="?", default=None,
                     help="JSON configuration file")
    run.add_argument("--scenario", default=None,
                     help="named scenario id (alternative to a config file)")
    run.add_argument("--set", dest="overrides", action="append", default=[],
                     metavar="KEY=VALUE",
                     help="override a config field by dotted path")
    run.add_argument("--out", default=None, help="output directory")

    sub.add_parser("list-scenarios", help="list the named scenarios")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "list-scenarios":
        for name in sorted(SCENARIOS) + ["custom"]:
            print(f"{name:8s} {SCENARIO_DESCRIPTIONS[name]}")
        return 0

    try:
        if (args.config is None) == (args.scenario is None):
            raise ConfigError("provide exactly one of CONFIG file or --scenario")
        if args.config is not None:
            cfg = load_config(args.config)
            raw = dict(cfg.raw)
        else:
            raw = {"scenario": args.scenario}
            raw = resolve_config(raw).raw
        for expr in args.overrides:
            key, value = _parse_set(expr)
            set_config_path(raw, key, value)
        cfg = resolve_config(raw)

        out_dir = args.out or os.environ.get("MSDSIM_OUTDIR") or cfg.output_dir or "."
        paths = execute(cfg, out_dir=out_dir)
    except ConfigError as exc:
        print(f"msdsim: config error: {exc}", file=sys.stderr)
        return 2
    except SimulationError as exc:
        print(f"msdsim: {exc}", file=sys.stderr)
        return 1

    summary = paths["summary_data"]
    finals = " ".join(f"{k}={v:.6f}" for k, v in
                      sorted(summary.final_populations.items())
                      if k in ("P1", "P2", "P3"))
    print(f"{summary.scenario}: {finals} F={summary.final_fidelity:.6f} "
          f"[{backend_name()} backend, {summary.wall_time_s:.2f}s]")
    print(f"wrote {paths['trajectory']}")
    print(f"wrote {paths['summary']}")
    if paths["sweep"] is not None:
        print(f"wrote {paths['sweep']}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
