"""Recursive kernel-ABC driver: the estimation loop, tuning, error metrics.

Each iteration simulates pseudo-data at the current particles, solves the
kernel-ABC ridge system against the observed summary, and herds a fresh
particle set from the resulting embedding. The point estimate is the first
herded point after the final iteration. When an iteration's weights collapse
(all simulations far from the data), herding degenerates to pure repulsion and
the next particle set spreads out to explore -- no special-casing is needed.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field, replace
from itertools import product

import numpy as np

from .discrepancy import energy_distance_quadratic
from .herding import SearchConfig, herd
from .kabc import WeightedParticleSet, embed_posterior
from .kernels import DegenerateBandwidthError, KernelConfig, median_heuristic
from .models import PriorSpec, SimulationDivergedError, SimulatorSpec, Summarizer, sample_prior, summarize
from .seeding import derive_seed


class RunAbortedError(RuntimeError):
    """The estimation loop could not continue; carries the partial trace."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


# Default tuning grids: bandwidth multipliers log-spaced over [2^-4, 2^4],
# regularization constants log-spaced over [1e-4, 1].
DEFAULT_BANDWIDTH_MULTIPLIERS = tuple(float(x) for x in np.exp2(np.arange(-4, 5)))
DEFAULT_DELTA_GRID = tuple(float(x) for x in np.logspace(-4, 0, 5))


class SelectionError(RuntimeError):
    """Every hyperparameter candidate failed."""


@dataclass(frozen=True)
class BandwidthPolicy:
    """How a kernel bandwidth is chosen each iteration.

    kind "median" recomputes the median heuristic over the iteration's points
    and multiplies it by ``multiplier``; kind "fixed" always uses ``value``.
    """

    kind: str = "median"
    value: float | None = None
    multiplier: float = 1.0

    def __post_init__(self):
        if self.kind not in ("median", "fixed"):
            raise ValueError(f"unknown bandwidth policy kind {self.kind!r}")
        if self.kind == "fixed" and (self.value is None or self.value <= 0):
            raise ValueError("fixed bandwidth policy needs a positive value")
        if self.multiplier <= 0:
            raise ValueError("bandwidth multiplier must be positive")


@dataclass(frozen=True)
class SearchSettings:
    """Herding search effort; the box itself is rebuilt every iteration.

    The per-iteration box is the bounding box of the current particles
    inflated by ``box_inflation`` of its width on each side, clamped to the
    simulator bounds where those are finite. ``fixed_box`` overrides this
    entirely when set.
    """

    pool_size: int = 200
    refine_steps: int = 8
    box_inflation: float = 0.5
    fixed_box: np.ndarray | None = None

    def __post_init__(self):
        if self.fixed_box is not None:
            object.__setattr__(self, "fixed_box", np.asarray(self.fixed_box, dtype=float))


@dataclass(frozen=True)
class RunConfig:
    """Everything one estimation run needs besides the observed data."""

    simulator: SimulatorSpec
    prior: PriorSpec
    summarizer: Summarizer
    n_particles: int
    n_iterations: int
    delta: float
    master_seed: int
    y_bandwidth: BandwidthPolicy = BandwidthPolicy()
    theta_bandwidth: BandwidthPolicy = BandwidthPolicy()
    search: SearchSettings = SearchSettings()

    def __post_init__(self):
        if self.n_particles < 2:
            raise ValueError("n_particles must be >= 2")
        if self.n_iterations < 1:
            raise ValueError("n_iterations must be >= 1")
        if self.delta <= 0:
            raise ValueError("delta must be positive")


@dataclass
class IterationRecord:
    """Diagnostics of one iteration of the loop."""

    iteration: int
    sum_weights: float
    estimate: np.ndarray
    data_error: float
    wall_time: float
    particles: np.ndarray
    y_bandwidth: float
    theta_bandwidth: float

    @property
    def particle_spread(self) -> np.ndarray:
        return self.particles.max(axis=0) - self.particles.min(axis=0)


@dataclass
class RunTrace:
    """Per-iteration records plus the final point estimate."""

    records: list[IterationRecord] = field(default_factory=list)

    @property
    def final_estimate(self) -> np.ndarray:
        if not self.records:
            raise ValueError("empty trace")
        return self.records[-1].estimate

    @property
    def sum_weights(self) -> np.ndarray:
        return np.array([r.sum_weights for r in self.records])

    @property
    def estimates(self) -> np.ndarray:
        return np.vstack([r.estimate for r in self.records])


def _resolve_bandwidth(policy: BandwidthPolicy, points: np.ndarray, last: float | None, what: str) -> float:
    if policy.kind == "fixed":
        return float(policy.value)
    try:
        return policy.multiplier * median_heuristic(points)
    except DegenerateBandwidthError:
        if last is not None:
            return last
        raise RunAbortedError(f"degenerate {what} bandwidth with no earlier value to fall back to")


def _iteration_box(particles: np.ndarray, settings: SearchSettings, bounds: np.ndarray | None) -> np.ndarray:
    if settings.fixed_box is not None:
        return settings.fixed_box
    lo = particles.min(axis=0)
    hi = particles.max(axis=0)
    width = hi - lo
    pad = settings.box_inflation * width
    # A collapsed dimension still needs a searchable sliver around it.
    center = 0.5 * (lo + hi)
    pad = np.where(pad > 0, pad, 1e-9 * (1.0 + np.abs(center)))
    box = np.column_stack([lo - pad, hi + pad])
    if bounds is not None:
        box[:, 0] = np.where(np.isfinite(bounds[:, 0]), np.maximum(box[:, 0], bounds[:, 0]), box[:, 0])
        box[:, 1] = np.where(np.isfinite(bounds[:, 1]), np.minimum(box[:, 1], bounds[:, 1]), box[:, 1])
        bad = box[:, 0] >= box[:, 1]
        if bad.any():
            box[bad] = bounds[bad]
    return box


def run_krabc(cfg: RunConfig, observed) -> RunTrace:
    """Run the full recursive estimation loop on one observed dataset.

    Deterministic given (cfg, observed): every random draw is seeded from
    ``cfg.master_seed`` and a structural tag. Raises :class:`RunAbortedError`
    when an entire iteration's simulations diverge (as opposed to merely
    landing far from the data, which the loop recovers from on its own).
    """
    observed = np.asarray(observed, dtype=float)
    if observed.size == 0:
        raise ValueError("observed dataset is empty")
    obs_summary = summarize(observed, cfg.summarizer)
    ms = cfg.master_seed
    n = cfg.n_particles

    particles = np.vstack(
        [sample_prior(cfg.prior, derive_seed(ms, "prior", i)) for i in range(n)]
    )
    trace = RunTrace()
    last_y_bw: float | None = None
    last_theta_bw: float | None = None

    for it in range(1, cfg.n_iterations + 1):
        tic = time.perf_counter()
        summaries = np.empty((n, obs_summary.shape[0]))
        diverged = 0
        for i in range(n):
            try:
                data = cfg.simulator.simulate(particles[i], derive_seed(ms, "sim", it, i))
                summaries[i] = summarize(data, cfg.summarizer)
            except SimulationDivergedError:
                diverged += 1
                summaries[i] = _edge_summary(cfg.summarizer, obs_summary)
        if diverged == n:
            raise RunAbortedError(f"all {n} simulations diverged at iteration {it}", trace)

        y_bw = _resolve_bandwidth(cfg.y_bandwidth, summaries, last_y_bw, "data-kernel")
        theta_bw = _resolve_bandwidth(cfg.theta_bandwidth, particles, last_theta_bw, "parameter-kernel")
        last_y_bw, last_theta_bw = y_bw, theta_bw

        embedding = embed_posterior(
            particles,
            summaries,
            obs_summary,
            ky_cfg=KernelConfig(y_bw),
            ktheta_cfg=KernelConfig(theta_bw),
            delta=cfg.delta,
        )
        box = _iteration_box(particles, cfg.search, cfg.simulator.bounds)
        search = SearchConfig(
            box=box,
            pool_size=cfg.search.pool_size,
            refine_steps=cfg.search.refine_steps,
            integer_mask=cfg.simulator.integer_mask,
        )
        herded = herd(embedding, n, search, seed=derive_seed(ms, "herd", it))
        estimate = herded[0].copy()

        try:
            pseudo = cfg.simulator.simulate(estimate, derive_seed(ms, "data-error", it))
            data_error = energy_distance_quadratic(observed, pseudo)
        except SimulationDivergedError:
            data_error = float("inf")

        trace.records.append(
            IterationRecord(
                iteration=it,
                sum_weights=embedding.sum_weights,
                estimate=estimate,
                data_error=data_error,
                wall_time=time.perf_counter() - tic,
                particles=particles,
                y_bandwidth=y_bw,
                theta_bandwidth=theta_bw,
            )
        )
        particles = herded
    return trace


def _edge_summary(s: Summarizer, obs_summary: np.ndarray) -> np.ndarray:
    """Summary standing in for a diverged simulation: maximally unlike the data."""
    if s.kind == "histogram":
        edge = np.zeros_like(obs_summary)
        edge[-1] = 1.0
        return edge
    # Mean/identity summaries have no natural edge; push far from the observed
    # summary at a scale the kernel will map to ~0 similarity.
    scale = 1.0 + np.abs(obs_summary).max()
    return obs_summary + 1e6 * scale


def select_hyperparameters(
    cfg_template: RunConfig,
    observed,
    y_multipliers=DEFAULT_BANDWIDTH_MULTIPLIERS,
    deltas=DEFAULT_DELTA_GRID,
    holdout_fraction: float = 0.25,
) -> RunConfig:
    """Pick (data-kernel bandwidth multiplier, delta) by held-out discrepancy.

    The observed records are split 75/25 with a seeded shuffle; each candidate
    configuration is run on the estimation part, data is simulated at its
    point estimate, and the quadratic energy distance to the held-out part
    scored. Lowest discrepancy wins; ties break toward the lower grid index
    (the grid is iterated in (multiplier, delta) row-major order).
    """
    observed = np.asarray(observed, dtype=float)
    if observed.ndim == 1:
        observed = observed.reshape(-1, 1)
    n_obs = observed.shape[0]
    n_hold = max(1, int(round(holdout_fraction * n_obs)))
    if n_obs - n_hold < 1:
        raise ValueError(f"cannot split {n_obs} observations {1 - holdout_fraction:.0%}/{holdout_fraction:.0%}")
    perm = np.random.default_rng(derive_seed(cfg_template.master_seed, "cv-split")).permutation(n_obs)
    estimation = observed[perm[n_hold:]]
    holdout = observed[perm[:n_hold]]

    candidates = list(product(y_multipliers, deltas))
    if not candidates:
        raise ValueError("empty candidate grid")

    best_idx, best_score, best_cfg = None, np.inf, None
    for idx, (mult, delta) in enumerate(candidates):
        y_policy = cfg_template.y_bandwidth
        if y_policy.kind == "median":
            y_policy = replace(y_policy, multiplier=float(mult))
        else:
            y_policy = replace(y_policy, value=float(mult) * y_policy.value)
        cand_cfg = replace(cfg_template, y_bandwidth=y_policy, delta=float(delta))
        try:
            trace = run_krabc(cand_cfg, estimation)
            pseudo = cand_cfg.simulator.simulate(
                trace.final_estimate, derive_seed(cfg_template.master_seed, "cv-score", idx)
            )
            score = energy_distance_quadratic(holdout, pseudo)
        except (RunAbortedError, SimulationDivergedError):
            continue
        if score < best_score:
            best_idx, best_score, best_cfg = idx, score, cand_cfg
    if best_cfg is None:
        raise SelectionError(f"all {len(candidates)} candidate configurations failed")
    return best_cfg


def parameter_error(estimate, truth) -> float:
    """Mean over coordinates of |estimate - truth| / |truth|.

    Coordinates with zero true value fall back to the absolute difference
    (flagged with a warning), since the relative error is undefined there.
    """
    est = np.asarray(estimate, dtype=float).ravel()
    tru = np.asarray(truth, dtype=float).ravel()
    if est.shape != tru.shape:
        raise ValueError(f"dimension mismatch: {est.shape} vs {tru.shape}")
    zero = tru == 0
    if zero.any():
        warnings.warn(
            f"{int(zero.sum())} coordinate(s) have zero true value; using absolute error there",
            UserWarning,
            stacklevel=2,
        )
    denom = np.where(zero, 1.0, np.abs(tru))
    return float(np.mean(np.abs(est - tru) / denom))


def sorted_mixture_error(estimate: tuple, truth: tuple) -> tuple[float, float]:
    """Label-invariant errors for mixture parameters.

    Components of the estimate are sorted by descending weight; the weight
    error is the Euclidean distance against the truth's weights padded with
    zeros, and the location error covers only the components matching the
    truth's nonzero weights (redundant components carry no ground truth).
    """
    phi_e, mu_e = (np.asarray(a, dtype=float).ravel() for a in estimate)
    phi_t, mu_t = (np.asarray(a, dtype=float).ravel() for a in truth)
    if phi_e.shape != mu_e.shape or phi_t.shape != mu_t.shape:
        raise ValueError("phi and mu lengths must match within each argument")
    n_active = int(np.count_nonzero(phi_t))
    if phi_e.shape[0] < n_active:
        raise ValueError(f"estimate has {phi_e.shape[0]} components, truth needs {n_active}")
    order_e = np.argsort(-phi_e, kind="stable")
    order_t = np.argsort(-phi_t, kind="stable")
    phi_es, mu_es = phi_e[order_e], mu_e[order_e]
    phi_ts, mu_ts = phi_t[order_t], mu_t[order_t]
    padded = np.zeros_like(phi_es)
    padded[: phi_ts.shape[0]] = phi_ts
    phi_err = float(np.linalg.norm(phi_es - padded))
    mu_err = float(np.linalg.norm(mu_es[:n_active] - mu_ts[:n_active]))
    return phi_err, mu_err
