"""Command-line entry point.

    qflab <subcommand> --config path.json [--quick] [--check] [--out dir] [--seed N]
    qflab <subcommand> --preset name      [--quick] [--check] [--out dir] [--seed N]

Subcommands: attack, landscape, train, spectrum, bounds, classical.
Exit codes: 0 success, 2 configuration error, 3 threshold failure in --check
mode.  QFLAB_THREADS caps the worker pool for parallel trials.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .config import EXPERIMENTS, load_config, preset_config
from .errors import ConfigurationError
from .experiments import check_thresholds, run_experiment


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qflab",
        description="Privacy experiments for federated learning with "
                    "expressive variational circuit models",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run a {name} experiment")
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--config", help="path to a JSON experiment config")
        src.add_argument("--preset", help="named preset (fig3, fig4, fig9, ...)")
        p.add_argument("--quick", action="store_true",
                       help="scaled-down smoke variant of the preset/config")
        p.add_argument("--check", action="store_true",
                       help="exit 3 if the run misses its acceptance thresholds")
        p.add_argument("--out", help="output directory (default artifacts/<name>)")
        p.add_argument("--seed", type=int, help="override the master seed")
    return parser


def resolve_config(args):
    if args.preset is not None:
        cfg = preset_config(args.preset, quick=args.quick, seed=args.seed,
                            out_dir=args.out)
    else:
        cfg = load_config(args.config)
        if args.quick:
            from .config import _apply_quick, config_from_dict

            cfg = config_from_dict(_apply_quick(cfg.to_dict()))
        updates = {}
        if args.seed is not None:
            updates["seed"] = args.seed
        if args.out is not None:
            updates["out_dir"] = args.out
        if updates:
            cfg = replace(cfg, **updates)
    if cfg.experiment != args.subcommand:
        raise ConfigurationError(
            f"config is for experiment {cfg.experiment!r} but the "
            f"{args.subcommand!r} subcommand was invoked"
        )
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        report = run_experiment(cfg)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    for key in sorted(report):
        value = report[key]
        if isinstance(value, float):
            value = f"{value:.6g}"
        print(f"{key}: {value}")
    if args.check:
        failures = check_thresholds(cfg, report)
        for failure in failures:
            print(f"CHECK FAILED: {failure}", file=sys.stderr)
        if failures:
            return 3
        print("all threshold checks passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
