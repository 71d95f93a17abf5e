"""Command-line entry point.

    mimodist <fig1|fig2|fig3|sweep> [--config PATH] [--out PATH]
             [--seed N] [--trials N] [--threads N]

Exit codes: 0 success, 1 validation error, 2 numerical failure. The
thread count falls back to the MIMODIST_THREADS environment variable
and then to 1.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

from .errors import MimodistError, NumericalError
from .harness import (
    EXPERIMENTS,
    default_spec,
    format_rows,
    parse_config,
    run_experiment,
    write_rows,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mimodist",
        description="Uplink SE experiments for massive MIMO with correlated "
        "receiver-hardware distortion.",
    )
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", help="flat key=value experiment config file")
    parser.add_argument("--out", help="CSV output path (default: config output_path, else stdout)")
    parser.add_argument("--seed", type=int, help="override the master seed")
    parser.add_argument("--trials", type=int, help="override the Monte Carlo trial count")
    parser.add_argument(
        "--threads",
        type=int,
        help="worker threads for trial fan-out (default: $MIMODIST_THREADS or 1)",
    )
    return parser


def _resolve_threads(arg_value) -> int:
    if arg_value is not None:
        return max(1, int(arg_value))
    env = os.environ.get("MIMODIST_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise MimodistError(
                f"MIMODIST_THREADS must be an integer, got {env!r}"
            ) from None
    return 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config is not None:
            spec = parse_config(args.config)
            if spec.experiment != args.experiment:
                raise MimodistError(
                    f"config requests experiment {spec.experiment!r} but the "
                    f"command line says {args.experiment!r}"
                )
        else:
            spec = default_spec(args.experiment)
        overrides = {}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.trials is not None:
            overrides["trials"] = args.trials
        if overrides:
            spec = dataclasses.replace(spec, base=spec.base.with_updates(**overrides))
        n_threads = _resolve_threads(args.threads)
        rows = run_experiment(spec, n_threads=n_threads)
        out = args.out or spec.output_path
        if out:
            write_rows(rows, out)
            print(f"wrote {len(rows)} rows to {out}")
        else:
            sys.stdout.write(format_rows(rows))
        return EXIT_OK
    except NumericalError as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (MimodistError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
