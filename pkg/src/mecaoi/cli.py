"""``mec`` command line: run experiments from YAML configs or presets."""

from __future__ import annotations

import argparse
import sys

from .experiments import (
    EXIT_DEGENERATE, EXIT_INVALID, EXIT_NONCONVERGED, ConfigError, builtin_experiments, load_config,
    preset, run,
)
from .sim import DegenerateEstimateError

SUBCOMMANDS = ("aoi", "simulate", "mfe", "nash", "mm-mfe", "sweep", "validate")


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mec", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, help=f"run a {name} experiment")
        src = p.add_mutually_exclusive_group(required=name != "validate")
        src.add_argument("--config", help="YAML experiment config")
        src.add_argument("--preset", help="built-in preset name (see list-presets)")
        p.add_argument("--out", help="CSV output path (default: config 'output' or stdout)")
        p.add_argument("--seed", type=int, help="master seed (overrides the config)")
        p.add_argument("--jobs", type=int, help="worker processes for sweeps")
    sub.add_parser("list-presets", help="list built-in presets")
    return ap


def _experiment_of(cfg, command):
    # presets carry their own kind; let a matching subcommand run them
    exp = cfg.get("experiment", command)
    if command in ("mfe", "nash", "mm-mfe") and exp == "sweep":
        return command
    return exp


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "list-presets":
        for name, p in builtin_experiments().items():
            print(f"{name:12s} {p['experiment']:9s} {p['description']}")
        return 0
    try:
        if args.preset:
            cfg = preset(args.preset)
        elif args.config:
            cfg = load_config(args.config)
        else:
            cfg = preset("validate")
        cfg["experiment"] = _experiment_of(cfg, args.command)
        if args.seed is not None:
            cfg["seed"] = args.seed
        if args.jobs is not None:
            cfg["jobs"] = args.jobs
        table, status = run(cfg, args.command)
    except ConfigError as exc:
        print(f"mec: invalid config: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except DegenerateEstimateError as exc:
        print(f"mec: degenerate simulation: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    out = args.out or cfg.get("output")
    if out:
        table.write(out)
        print(f"mec: wrote {len(table.rows)} rows to {out}", file=sys.stderr)
    else:
        sys.stdout.write(table.to_csv())
    if status == EXIT_NONCONVERGED:
        print("mec: at least one solver run did not converge", file=sys.stderr)
    elif status != 0:
        print("mec: a validation check failed (|z| > 3)", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
