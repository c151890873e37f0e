"""Diagnostic figures rendered next to the CSV reports."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

plt.rcParams["figure.dpi"] = 110
plt.rcParams["savefig.bbox"] = "tight"


def render_experiment_figures(bundle, records, out_dir) -> list[Path]:
    """Render per-experiment diagnostics; returns the written paths."""
    out_dir = Path(out_dir)
    traced = [rec for rec in records if rec.trace is not None and rec.trace.records]
    if not traced:
        return []
    written = []
    written.append(_plot_sum_of_weights(traced, out_dir / "fig_sum_of_weights.png"))
    written.append(_plot_data_error(traced, out_dir / "fig_data_error.png"))
    written.append(_plot_estimates(bundle, traced, out_dir / "fig_estimates.png"))
    if traced[0].trace.records[0].particles.shape[1] == 1:
        written.append(_plot_particles_1d(traced[0], out_dir / "fig_particles.png"))
    return [p for p in written if p is not None]


def _plot_sum_of_weights(records, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 3.5))
    for rec in records:
        its = [r.iteration for r in rec.trace.records]
        sums = np.abs([r.sum_weights for r in rec.trace.records])
        ax.plot(its, np.maximum(sums, 1e-300), marker="o", ms=3, label=f"trial {rec.trial}")
    ax.set_yscale("log")
    ax.set_xlabel("iteration")
    ax.set_ylabel("|sum of weights|")
    ax.set_title("Weight collapse / recovery per iteration")
    if len(records) <= 8:
        ax.legend(fontsize=7)
    fig.savefig(path)
    plt.close(fig)
    return path


def _plot_data_error(records, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 3.5))
    for rec in records:
        its = [r.iteration for r in rec.trace.records]
        errs = [r.data_error for r in rec.trace.records]
        ax.plot(its, errs, marker="o", ms=3, label=f"trial {rec.trial}")
    ax.set_yscale("log")
    ax.set_xlabel("iteration")
    ax.set_ylabel("energy distance to observed data")
    ax.set_title("Data error of the running estimate")
    if len(records) <= 8:
        ax.legend(fontsize=7)
    fig.savefig(path)
    plt.close(fig)
    return path


def _plot_estimates(bundle, records, path: Path) -> Path:
    dim = len(bundle.param_names)
    n_show = min(dim, 8)
    ncols = min(n_show, 4)
    nrows = (n_show + ncols - 1) // ncols
    fig, axes = plt.subplots(nrows, ncols, figsize=(3.2 * ncols, 2.6 * nrows), squeeze=False)
    for j in range(n_show):
        ax = axes[j // ncols][j % ncols]
        for rec in records:
            its = [r.iteration for r in rec.trace.records]
            vals = [bundle.to_natural(r.estimate)[j] for r in rec.trace.records]
            ax.plot(its, vals, marker="o", ms=2, lw=0.8)
        if bundle.truth is not None:
            ax.axhline(bundle.truth[j], color="k", ls="--", lw=0.8)
        ax.set_title(bundle.param_names[j], fontsize=8)
        ax.tick_params(labelsize=7)
    for j in range(n_show, nrows * ncols):
        axes[j // ncols][j % ncols].axis("off")
    fig.suptitle("Per-iteration estimates (dashed: truth)", fontsize=10)
    fig.savefig(path)
    plt.close(fig)
    return path


def _plot_particles_1d(record, path: Path) -> Path:
    """Stacked particle histograms across iterations for 1-D parameters."""
    recs = record.trace.records
    n_show = min(len(recs), 6)
    fig, axes = plt.subplots(n_show, 1, figsize=(6, 1.6 * n_show), squeeze=False)
    for i in range(n_show):
        r = recs[i]
        ax = axes[i][0]
        ax.hist(r.particles[:, 0], bins=40, color="tab:blue", alpha=0.8)
        ax.set_ylabel(f"iter {r.iteration}", fontsize=8)
        ax.set_title(f"sum of weights = {r.sum_weights:.2e}", fontsize=8)
        ax.tick_params(labelsize=7)
    axes[-1][0].set_xlabel("parameter value")
    fig.suptitle("Particle spread per iteration (trial 0)", fontsize=10)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path
