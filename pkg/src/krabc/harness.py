"""Benchmark orchestration: trials, CSV reports, dry-run validation.

Trial t runs with seed ``master_seed + t``; re-running a single trial in
isolation only needs that arithmetic. Deliverables per run directory:

  results.csv   one row per trial (errors, estimates, status)
  trace.csv     one row per trial x iteration (sum of weights, data error,
                per-iteration estimate)
  summary.csv   mean/std per metric over successful trials
  timings.csv   wall-clock seconds (hardware-bound; kept out of the
                deterministic files so identical runs are byte-identical)
  fig_*.png     diagnostic figures rendered from the traces
"""

from __future__ import annotations

import csv
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import ExperimentConfig
from .driver import RunAbortedError, RunTrace, run_krabc
from .experiments import ExperimentBundle, get_experiment
from .models import SimulationDivergedError, sample_prior
from .seeding import derive_seed


@dataclass
class ResultRecord:
    """Outcome of one trial."""

    trial: int
    seed: int
    estimate: np.ndarray | None
    errors: dict[str, float]
    data_error: float
    wall_s: float
    trace: RunTrace | None
    status: str = "ok"

    @property
    def failed(self) -> bool:
        return self.status != "ok"


@dataclass
class ExperimentResult:
    bundle: ExperimentBundle
    config: ExperimentConfig
    records: list[ResultRecord]
    out_dir: Path


def _run_trial(bundle: ExperimentBundle, trial: int, seed: int) -> ResultRecord:
    tic = time.perf_counter()
    try:
        observed = bundle.make_observed(seed)
        run_cfg = bundle.make_config(observed, seed)
        trace = run_krabc(run_cfg, observed)
        estimate = bundle.to_natural(trace.final_estimate)
        errors = bundle.metrics(estimate, observed)
        return ResultRecord(
            trial=trial,
            seed=seed,
            estimate=estimate,
            errors=errors,
            data_error=trace.records[-1].data_error,
            wall_s=time.perf_counter() - tic,
            trace=trace,
        )
    except (RunAbortedError, SimulationDivergedError) as exc:
        return ResultRecord(
            trial=trial,
            seed=seed,
            estimate=None,
            errors={},
            data_error=float("nan"),
            wall_s=time.perf_counter() - tic,
            trace=getattr(exc, "trace", None),
            status=f"failed:{type(exc).__name__}",
        )


def run_experiment(cfg: ExperimentConfig, write_figures: bool = True) -> ExperimentResult:
    """Run all trials of an experiment and write the report files."""
    bundle = get_experiment(cfg.experiment, **cfg.overrides)
    seeds = [cfg.master_seed + t for t in range(cfg.trials)]

    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            records = list(pool.map(lambda args: _run_trial(bundle, *args), enumerate(seeds)))
    else:
        records = [_run_trial(bundle, t, s) for t, s in enumerate(seeds)]

    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_reports(bundle, records, out_dir)
    if write_figures:
        from . import plots

        plots.render_experiment_figures(bundle, records, out_dir)
    return ExperimentResult(bundle=bundle, config=cfg, records=records, out_dir=out_dir)


def _error_names(records: list[ResultRecord]) -> list[str]:
    for rec in records:
        if not rec.failed:
            return list(rec.errors.keys())
    return ["param_error"]


def _fmt(x) -> str:
    if isinstance(x, float) and np.isnan(x):
        return "nan"
    return repr(float(x)) if isinstance(x, (float, np.floating)) else str(x)


def write_reports(bundle: ExperimentBundle, records: list[ResultRecord], out_dir: Path):
    """Write results.csv, trace.csv, summary.csv, timings.csv."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    err_names = _error_names(records)
    extra_errors = [e for e in err_names if e != "param_error"]
    param_cols = [f"est_{name}" for name in bundle.param_names]

    with open(out_dir / "results.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["trial", "seed", "param_error", "data_error"] + param_cols + extra_errors + ["status"])
        for rec in records:
            if rec.failed:
                row = [rec.trial, rec.seed, "", ""] + [""] * len(param_cols) + [""] * len(extra_errors)
            else:
                row = (
                    [rec.trial, rec.seed, _fmt(rec.errors.get("param_error", float("nan"))), _fmt(rec.data_error)]
                    + [_fmt(v) for v in rec.estimate]
                    + [_fmt(rec.errors[e]) for e in extra_errors]
                )
            writer.writerow(row + [rec.status])

    with open(out_dir / "trace.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["trial", "iteration", "sum_of_weights", "data_error"] + param_cols)
        for rec in records:
            if rec.trace is None:
                continue
            for r in rec.trace.records:
                est = bundle.to_natural(r.estimate)
                writer.writerow(
                    [rec.trial, r.iteration, _fmt(r.sum_weights), _fmt(r.data_error)]
                    + [_fmt(v) for v in est]
                )

    ok = [rec for rec in records if not rec.failed]
    with open(out_dir / "summary.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", "mean", "std", "n_trials"])
        if ok:
            metrics = {name: np.array([rec.errors[name] for rec in ok]) for name in err_names}
            metrics["data_error"] = np.array([rec.data_error for rec in ok])
            for name, vals in metrics.items():
                # std over a single trial is 0 by convention; n_trials flags it.
                std = float(np.std(vals)) if len(vals) > 1 else 0.0
                writer.writerow([name, _fmt(float(np.mean(vals))), _fmt(std), len(vals)])
        writer.writerow(["failed_trials", _fmt(float(len(records) - len(ok))), _fmt(0.0), len(records)])

    with open(out_dir / "timings.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["trial", "wall_s"])
        for rec in records:
            writer.writerow([rec.trial, f"{rec.wall_s:.3f}"])


@dataclass
class ValidationReport:
    checks: list[tuple[str, bool, str]]

    @property
    def ok(self) -> bool:
        return all(passed for _, passed, _ in self.checks)

    def lines(self) -> list[str]:
        return [f"[{'ok' if passed else 'FAIL'}] {name}: {detail}" for name, passed, detail in self.checks]


def validate(cfg: ExperimentConfig) -> ValidationReport:
    """Dry-run checks: smoke simulation, prior sample, simulation budget."""
    checks: list[tuple[str, bool, str]] = []

    try:
        bundle = get_experiment(cfg.experiment, **cfg.overrides)
        checks.append(("experiment", True, cfg.experiment))
    except Exception as exc:
        checks.append(("experiment", False, f"{type(exc).__name__}: {exc}"))
        return ValidationReport(checks)

    run_cfg = None
    try:
        observed = bundle.make_observed(cfg.master_seed)
        run_cfg = bundle.make_config(observed, cfg.master_seed)
        checks.append(("observed-data", True, f"shape {observed.shape}"))
    except Exception as exc:
        checks.append(("observed-data", False, f"{type(exc).__name__}: {exc}"))

    if run_cfg is not None:
        try:
            theta = sample_prior(run_cfg.prior, derive_seed(cfg.master_seed, "validate-prior"))
            checks.append(("prior-sample", True, np.array2string(theta, precision=4)))
            data = run_cfg.simulator.simulate(theta, derive_seed(cfg.master_seed, "validate-sim"))
            checks.append(("simulator-smoke", True, f"dataset shape {data.shape}"))
        except SimulationDivergedError as exc:
            checks.append(("simulator-smoke", True, f"diverged (handled at run time): {exc}"))
        except Exception as exc:
            checks.append(("simulator-smoke", False, f"{type(exc).__name__}: {exc}"))
        total = cfg.trials * run_cfg.n_iterations * run_cfg.n_particles
        checks.append(
            (
                "simulation-budget",
                True,
                f"{cfg.trials} trials x {run_cfg.n_iterations} iterations x "
                f"{run_cfg.n_particles} particles = {total} simulations",
            )
        )

    out_dir = Path(cfg.out_dir)
    if out_dir.exists():
        checks.append(("output-dir", True, f"{out_dir} exists"))
    else:
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
            checks.append(("output-dir", True, f"{out_dir} created"))
        except OSError as exc:
            checks.append(("output-dir", False, f"cannot create {out_dir}: {exc}"))
    return ValidationReport(checks)
