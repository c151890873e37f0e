"""Command line interface.

    krabc run --config PATH [--jobs N] [--out DIR]
    krabc validate --config PATH
    krabc bench EXPERIMENT [--trials N] [--scale desk|paper] [--jobs N] [--out DIR]

Exit codes: 0 success, 1 all trials failed, 2 config error. The environment
variable KRABC_SEED overrides the master seed. Report files per run directory:
results.csv (trial, seed, param_error, data_error, one column per estimated
parameter, any extra experiment metrics, status), trace.csv (trial, iteration,
sum_of_weights, data_error, per-iteration estimates), summary.csv (mean/std
per metric), timings.csv (wall clock, excluded from the determinism
guarantee), and fig_*.png diagnostics.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from .config import ConfigError, DEFAULT_MASTER_SEED, ExperimentConfig, load_config
from .experiments import DEFAULT_TRIALS, EXPERIMENTS
from .harness import run_experiment, validate

EXIT_OK = 0
EXIT_ALL_FAILED = 1
EXIT_CONFIG = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="krabc",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment described by a JSON config")
    run_p.add_argument("--config", required=True, help="path to the JSON config file")
    run_p.add_argument("--jobs", type=int, default=None, help="trial worker pool size")
    run_p.add_argument("--out", default=None, help="output directory (overrides config)")
    run_p.add_argument("--no-figures", action="store_true", help="skip figure rendering")

    val_p = sub.add_parser("validate", help="dry-run checks for a JSON config")
    val_p.add_argument("--config", required=True)

    bench_p = sub.add_parser("bench", help="run a named built-in benchmark")
    bench_p.add_argument("experiment", choices=sorted(EXPERIMENTS))
    bench_p.add_argument("--trials", type=int, default=None)
    bench_p.add_argument("--scale", choices=("desk", "paper"), default="desk")
    bench_p.add_argument("--jobs", type=int, default=1)
    bench_p.add_argument("--out", default=None)
    bench_p.add_argument("--seed", type=int, default=None, help="master seed (default fixed)")
    bench_p.add_argument("--no-figures", action="store_true")
    return parser


def _print_result_summary(result):
    ok = [r for r in result.records if not r.failed]
    print(f"experiment: {result.bundle.name}")
    print(f"trials: {len(result.records)} ({len(ok)} succeeded)")
    for rec in result.records:
        if rec.failed:
            print(f"  trial {rec.trial} seed {rec.seed}: {rec.status}")
        else:
            errs = ", ".join(f"{k}={v:.4g}" for k, v in rec.errors.items())
            print(f"  trial {rec.trial} seed {rec.seed}: {errs}, data_error={rec.data_error:.4g}")
    print(f"reports written to {result.out_dir}")


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    try:
        if args.command == "run":
            cfg = load_config(args.config)
            if args.jobs is not None:
                cfg = replace(cfg, jobs=args.jobs)
            if args.out is not None:
                cfg = replace(cfg, out_dir=args.out)
        elif args.command == "validate":
            cfg = load_config(args.config)
        else:  # bench
            seed = args.seed if args.seed is not None else DEFAULT_MASTER_SEED
            env_seed = os.environ.get("KRABC_SEED")
            if env_seed is not None:
                seed = int(env_seed)
            trials = args.trials
            if trials is None:
                trials = DEFAULT_TRIALS[args.scale][args.experiment]
            cfg = ExperimentConfig(
                experiment=args.experiment,
                trials=trials,
                master_seed=seed,
                out_dir=args.out or "",
                jobs=args.jobs,
                scale=args.scale,
            )
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "validate":
        report = validate(cfg)
        for line in report.lines():
            print(line)
        return EXIT_OK

    result = run_experiment(cfg, write_figures=not args.no_figures)
    _print_result_summary(result)
    if all(rec.failed for rec in result.records):
        return EXIT_ALL_FAILED
    return EXIT_OK


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
