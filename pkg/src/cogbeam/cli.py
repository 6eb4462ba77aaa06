"""Command-line front end.

Exit codes: 0 on success, 1 on configuration errors, 2 on I/O errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

from .harness import ConfigError, SweepSpec, emit_plot, load_config, run_sweep


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cogbeam",
        description="Monte-Carlo sum-rate sweeps for an underlay mmWave "
                    "downlink with hybrid precoding")
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser(
        "simulate", help="run a sweep and write CSV results")
    simulate.add_argument("--config", required=True,
                          help="path to a key = value sweep configuration")
    simulate.add_argument("--out-dir", default="results",
                          help="directory for rows.csv / aggregates.csv "
                               "(default: results)")
    simulate.add_argument("--seed", type=int, default=None,
                          help="override the configured master seed")
    simulate.add_argument("--threads", type=int, default=1,
                          help="worker threads (results are identical for "
                               "any value)")
    simulate.add_argument("--plot", action="store_true",
                          help="also write sum_rate.svg")

    validate = commands.add_parser(
        "validate", help="parse a configuration and report derived sizes")
    validate.add_argument("--config", required=True)
    return parser


def _load_spec(path: str) -> SweepSpec:
    try:
        with open(path) as handle:
            text = handle.read()
    except OSError as err:
        raise _IoFailure(f"cannot read config {path}: {err}") from err
    return load_config(text)


class _IoFailure(Exception):
    pass


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        spec = _load_spec(args.config)
    except _IoFailure as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 1

    if args.command == "validate":
        _describe(spec)
        return 0

    if args.seed is not None:
        if args.seed < 0:
            print("config error: --seed must be >= 0", file=sys.stderr)
            return 1
        spec = dataclasses.replace(spec, master_seed=args.seed)
    if args.threads < 1:
        print("config error: --threads must be >= 1", file=sys.stderr)
        return 1

    rows, aggregates = run_sweep(spec, threads=args.threads)
    try:
        from .harness import write_csv
        rows_path, agg_path = write_csv(rows, aggregates, args.out_dir)
        paths = [rows_path, agg_path]
        if args.plot:
            paths.append(emit_plot(
                aggregates, os.path.join(args.out_dir, "sum_rate.svg")))
    except OSError as err:
        print(f"error: cannot write results: {err}", file=sys.stderr)
        return 2

    discarded = sum(agg.trials_discarded for agg in aggregates)
    print(f"{len(spec.points())} sweep points x {spec.trials} trials, "
          f"{len(rows)} rows ({discarded} discarded)")
    for path in paths:
        print(f"wrote {path}")
    return 0


def _describe(spec: SweepSpec) -> None:
    cfg = spec.config
    print(f"channel model : {spec.channel_model}")
    print(f"schemes       : {', '.join(spec.schemes)}")
    print(f"antennas      : N_t={cfg.n_tx}, N_r={cfg.n_rx}, "
          f"primary N_r={cfg.n_rx_primary}")
    ks = spec.k_values or (cfg.users,)
    for k in ks:
        point = spec.config_for(k)
        print(f"K={point.users}: M_t={point.rf_tx}, M_r={point.rf_rx}, "
              f"D={point.streams} -> {point.users * point.streams} streams")
    print(f"i_th_db       : {', '.join(f'{v:g}' for v in spec.i_th_db)}")
    print(f"trials        : {spec.trials} (seed {spec.master_seed})")
    print("config OK")


if __name__ == "__main__":
    sys.exit(main())
