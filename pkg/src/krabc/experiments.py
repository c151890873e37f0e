"""Built-in benchmark experiments: simulator/prior/summarizer bundles.

Each bundle fixes a ground truth, generates observed data for a trial seed,
and builds the RunConfig for that trial. Parameterizations with constraints
(positive integers, probability simplexes, positive-definite covariances) are
searched in an unconstrained space and projected to the valid region at the
simulator boundary; ``to_natural`` applies the same projection to estimates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .driver import BandwidthPolicy, RunConfig, SearchSettings, parameter_error, sorted_mixture_error
from .models import (
    PriorSpec,
    SimulatorSpec,
    Summarizer,
    make_identity_spec,
    sim_alpha_stable,
    sim_blowfly,
    sim_gaussian_mean,
    sim_gaussian_mixture,
)
from .seeding import derive_seed

# True mean vector of the 20-dimensional misspecified-prior benchmark.
GAUSS_TRUE_MEAN = np.array(
    [10, 50, 90, 130, 180, 280, 390, 430, 520, 630,
     1010, 1050, 1090, 1130, 1180, 1280, 1390, 1430, 1520, 1630],
    dtype=float,
)

BLOWFLY_TRUE_THETA = np.array([29.0, 260.0, 0.6, 0.3, 7.0, 0.2])
BLOWFLY_PRIOR_LOCS = np.array([2.0, 5.0, -0.5, -0.5, 2.0, -1.0])
BLOWFLY_PRIOR_SCALES = np.array([2.0, 0.5, 1.0, 1.0, 1.0, 0.4])

ALPHA_STABLE_TRUE_THETA = np.array([1.3, 1.0, 0.2])

MIXTURE_TRUE_PHI = np.array([0.7, 0.3])
MIXTURE_TRUE_MU = np.array([110.0, 70.0])
MIXTURE_COMPONENT_SD = float(np.sqrt(20.0))


@dataclass(frozen=True)
class ExperimentBundle:
    """One runnable benchmark: data generation, configuration, and scoring."""

    name: str
    param_names: tuple[str, ...]
    truth: np.ndarray | None
    make_observed: Callable[[int], np.ndarray]
    make_config: Callable[[np.ndarray, int], RunConfig]
    to_natural: Callable[[np.ndarray], np.ndarray]
    metrics: Callable[[np.ndarray, np.ndarray], dict[str, float]]


def _search(pool_size, refine_steps, box_inflation=0.5, fixed_box=None):
    return SearchSettings(
        pool_size=pool_size,
        refine_steps=refine_steps,
        box_inflation=box_inflation,
        fixed_box=fixed_box,
    )


def gauss_misspecified_bundle(
    dim: int = 20,
    truth=None,
    cov_diag: float = 40.0,
    n_obs: int = 100,
    prior_low: float = 9.0e6,
    prior_high: float = 1.0e7,
    n_particles: int = 100,
    n_iterations: int = 30,
    delta: float = 1e-3,
    pool_size: int = 200,
    refine_steps: int = 8,
    y_multiplier: float = 1.0,
    theta_multiplier: float = 1.0,
) -> ExperimentBundle:
    """Gaussian mean estimation with a severely misspecified uniform prior."""
    if truth is None:
        truth = GAUSS_TRUE_MEAN[:dim] if dim <= GAUSS_TRUE_MEAN.shape[0] else None
    truth = np.asarray(truth, dtype=float).ravel()
    if truth.shape[0] != dim:
        raise ValueError(f"truth has dimension {truth.shape[0]}, expected {dim}")
    prior = PriorSpec(kind="uniform-box", bounds=np.tile([prior_low, prior_high], (dim, 1)))
    spec = SimulatorSpec(
        name="gaussian-mean",
        param_dim=dim,
        obs_dim=dim,
        fn=lambda theta, seed: sim_gaussian_mean(theta, n_obs, cov_diag, seed),
        fixed_params={"cov_diag": cov_diag, "n_obs": n_obs},
    )

    def make_observed(trial_seed):
        return sim_gaussian_mean(truth, n_obs, cov_diag, derive_seed(trial_seed, "observed"))

    def make_config(observed, trial_seed):
        return RunConfig(
            simulator=spec,
            prior=prior,
            summarizer=Summarizer(kind="mean"),
            n_particles=n_particles,
            n_iterations=n_iterations,
            delta=delta,
            master_seed=trial_seed,
            y_bandwidth=BandwidthPolicy(kind="median", multiplier=y_multiplier),
            theta_bandwidth=BandwidthPolicy(kind="median", multiplier=theta_multiplier),
            search=_search(pool_size, refine_steps),
        )

    def metrics(estimate, observed):
        return {"param_error": parameter_error(estimate, truth)}

    return ExperimentBundle(
        name="gauss-misspecified",
        param_names=tuple(f"mu_{i}" for i in range(dim)),
        truth=truth,
        make_observed=make_observed,
        make_config=make_config,
        to_natural=lambda raw: np.asarray(raw, dtype=float).copy(),
        metrics=metrics,
    )


_BLOWFLY_LOG_BOUNDS = np.array(
    [(-6.0, 9.0), (0.0, 12.0), (-7.0, 3.0), (-7.0, 3.0), (0.0, 6.9), (-7.0, 3.0)]
)


def _blowfly_natural(theta_log: np.ndarray) -> np.ndarray:
    log = np.clip(np.asarray(theta_log, dtype=float).ravel(), _BLOWFLY_LOG_BOUNDS[:, 0], _BLOWFLY_LOG_BOUNDS[:, 1])
    nat = np.exp(log)
    for i in (0, 1, 4):  # P, N0, tau are positive integers
        nat[i] = max(1.0, np.rint(nat[i]))
    return nat


def blowfly_bundle(
    truth=BLOWFLY_TRUE_THETA,
    t_len: int = 1000,
    burn_in: int = 50,
    bins: int = 1000,
    n_particles: int = 100,
    n_iterations: int = 13,
    delta: float = 1e-3,
    pool_size: int = 200,
    refine_steps: int = 6,
    y_multiplier: float = 1.0,
    theta_multiplier: float = 1.0,
) -> ExperimentBundle:
    """Blowfly population dynamics; parameters searched in log space."""
    truth = np.asarray(truth, dtype=float).ravel()
    prior = PriorSpec(kind="normal-product", means=BLOWFLY_PRIOR_LOCS, sds=BLOWFLY_PRIOR_SCALES)
    spec = SimulatorSpec(
        name="blowfly-log",
        param_dim=6,
        obs_dim=1,
        fn=lambda theta, seed: sim_blowfly(_blowfly_natural(theta), t_len, burn_in, seed),
        bounds=_BLOWFLY_LOG_BOUNDS,
        fixed_params={"t_len": t_len, "burn_in": burn_in},
    )

    def make_observed(trial_seed):
        return sim_blowfly(truth, t_len, burn_in, derive_seed(trial_seed, "observed"))

    def make_config(observed, trial_seed):
        # The top edge bin doubles as the bucket for runaway populations.
        hist_hi = 2.0 * float(np.max(observed))
        return RunConfig(
            simulator=spec,
            prior=prior,
            summarizer=Summarizer(kind="histogram", bins=bins, range=(0.0, hist_hi)),
            n_particles=n_particles,
            n_iterations=n_iterations,
            delta=delta,
            master_seed=trial_seed,
            y_bandwidth=BandwidthPolicy(kind="median", multiplier=y_multiplier),
            theta_bandwidth=BandwidthPolicy(kind="median", multiplier=theta_multiplier),
            search=_search(pool_size, refine_steps),
        )

    def metrics(estimate, observed):
        return {"param_error": parameter_error(estimate, truth)}

    return ExperimentBundle(
        name="blowfly",
        param_names=("P", "N0", "sigma_d", "sigma_p", "tau", "delta"),
        truth=truth,
        make_observed=make_observed,
        make_config=make_config,
        to_natural=_blowfly_natural,
        metrics=metrics,
    )


def _alpha_stable_project(theta: np.ndarray, d: int) -> np.ndarray:
    alpha = float(np.clip(theta[0], 0.05, 2.0))
    q_diag = float(max(theta[1], 0.05))
    q_off = float(np.clip(theta[2], 0.0, 0.995 * q_diag))
    return np.array([alpha, q_diag, q_off])


def alpha_stable_bundle(
    truth=ALPHA_STABLE_TRUE_THETA,
    d: int = 2,
    n_obs: int = 1000,
    bins: int = 24,
    range_quantile: float = 0.9,
    range_scale: float = 1.5,
    n_particles: int = 100,
    n_iterations: int = 14,
    delta: float = 1e-3,
    pool_size: int = 200,
    refine_steps: int = 6,
    y_multiplier: float = 1.0,
    theta_multiplier: float = 1.0,
    amplitude: str = "verbatim",
) -> ExperimentBundle:
    """Elliptically contoured alpha-stable tail/covariance estimation."""
    truth = np.asarray(truth, dtype=float).ravel()
    bounds = np.array([(0.02, 2.0), (0.02, 8.0), (0.0, 8.0)])

    def pd_ok(theta):
        a, qd, qo = theta
        return a > 0.02 and qd > 0.02 and qd - qo > 0 and qd + (d - 1) * qo > 0

    prior = PriorSpec(
        kind="uniform-box",
        bounds=np.array([(0.0, 2.0), (0.0, 5.0), (0.0, 5.0)]),
        constraint=pd_ok,
    )
    spec = SimulatorSpec(
        name="alpha-stable",
        param_dim=3,
        obs_dim=d,
        fn=lambda theta, seed: sim_alpha_stable(
            _alpha_stable_project(theta, d), d, n_obs, seed, amplitude=amplitude
        ),
        bounds=bounds,
        fixed_params={"d": d, "n_obs": n_obs, "amplitude": amplitude},
    )

    def make_observed(trial_seed):
        return sim_alpha_stable(truth, d, n_obs, derive_seed(trial_seed, "observed"), amplitude=amplitude)

    def make_config(observed, trial_seed):
        # Heavy tails: span the central mass, let the edge bins absorb outliers.
        r = max(5.0, range_scale * float(np.quantile(np.abs(observed), range_quantile)))
        return RunConfig(
            simulator=spec,
            prior=prior,
            summarizer=Summarizer(kind="histogram", bins=bins, range=(-r, r)),
            n_particles=n_particles,
            n_iterations=n_iterations,
            delta=delta,
            master_seed=trial_seed,
            y_bandwidth=BandwidthPolicy(kind="median", multiplier=y_multiplier),
            theta_bandwidth=BandwidthPolicy(kind="median", multiplier=theta_multiplier),
            search=_search(pool_size, refine_steps),
        )

    def metrics(estimate, observed):
        return {
            "param_error": parameter_error(estimate, truth),
            "alpha_error": float(abs(estimate[0] - truth[0])),
        }

    return ExperimentBundle(
        name="alpha-stable",
        param_names=("alpha", "q_diag", "q_offdiag"),
        truth=truth,
        make_observed=make_observed,
        make_config=make_config,
        to_natural=lambda raw: _alpha_stable_project(np.asarray(raw, dtype=float).ravel(), d),
        metrics=metrics,
    )


def _mixture_project(theta: np.ndarray, k: int) -> np.ndarray:
    theta = np.asarray(theta, dtype=float).ravel()
    phi = np.clip(theta[:k], 0.0, None)
    total = phi.sum()
    phi = np.full(k, 1.0 / k) if total < 1e-12 else phi / total
    return np.concatenate([phi, theta[k:]])


def mixture_bundle(
    components: int = 4,
    n_obs: int = 3000,
    bins: int = 300,
    mu_prior_sd: float = 100.0,
    concentration: float = 0.01,
    n_particles: int = 100,
    n_iterations: int = 10,
    delta: float = 1e-3,
    pool_size: int = 200,
    refine_steps: int = 6,
    y_multiplier: float = 1.0,
    theta_multiplier: float = 1.0,
) -> ExperimentBundle:
    """Redundant Gaussian mixture: 2 true components fit with ``components``."""
    k = components
    if k < MIXTURE_TRUE_PHI.shape[0]:
        raise ValueError(f"need at least {MIXTURE_TRUE_PHI.shape[0]} components, got {k}")
    prior = PriorSpec(
        kind="composite",
        blocks=(
            PriorSpec(kind="dirichlet-scaled", concentrations=np.full(k, concentration)),
            PriorSpec(kind="normal-product", means=np.zeros(k), sds=np.full(k, mu_prior_sd)),
        ),
    )
    bounds = np.column_stack(
        [
            np.concatenate([np.zeros(k), np.full(k, -np.inf)]),
            np.concatenate([np.ones(k), np.full(k, np.inf)]),
        ]
    )

    def simulate(theta, seed):
        nat = _mixture_project(theta, k)
        return sim_gaussian_mixture(nat[:k], nat[k:], MIXTURE_COMPONENT_SD, n_obs, seed)

    spec = SimulatorSpec(
        name="gaussian-mixture",
        param_dim=2 * k,
        obs_dim=1,
        fn=simulate,
        bounds=bounds,
        fixed_params={"n_obs": n_obs, "component_sd": MIXTURE_COMPONENT_SD},
    )

    def make_observed(trial_seed):
        return sim_gaussian_mixture(
            MIXTURE_TRUE_PHI, MIXTURE_TRUE_MU, MIXTURE_COMPONENT_SD, n_obs,
            derive_seed(trial_seed, "observed"),
        )

    def make_config(observed, trial_seed):
        # Cover both the observed support and the prior-predictive scale so
        # first-iteration pseudo-data lands on informative bins.
        margin = 2.5 * mu_prior_sd + 3.0 * MIXTURE_COMPONENT_SD
        lo = float(np.min(observed)) - margin
        hi = float(np.max(observed)) + margin
        return RunConfig(
            simulator=spec,
            prior=prior,
            summarizer=Summarizer(kind="histogram", bins=bins, range=(lo, hi)),
            n_particles=n_particles,
            n_iterations=n_iterations,
            delta=delta,
            master_seed=trial_seed,
            y_bandwidth=BandwidthPolicy(kind="median", multiplier=y_multiplier),
            theta_bandwidth=BandwidthPolicy(kind="median", multiplier=theta_multiplier),
            search=_search(pool_size, refine_steps),
        )

    truth_phi = np.zeros(k)
    truth_phi[: MIXTURE_TRUE_PHI.shape[0]] = MIXTURE_TRUE_PHI
    truth_mu = np.zeros(k)
    truth_mu[: MIXTURE_TRUE_MU.shape[0]] = MIXTURE_TRUE_MU

    def metrics(estimate, observed):
        phi_err, mu_err = sorted_mixture_error(
            (estimate[:k], estimate[k:]), (truth_phi, truth_mu)
        )
        order = np.argsort(-estimate[:k], kind="stable")
        top = np.concatenate([estimate[:k][order[:2]], estimate[k:][order[:2]]])
        ref = np.concatenate([MIXTURE_TRUE_PHI, MIXTURE_TRUE_MU])
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            rel = parameter_error(top, ref)
        return {"param_error": rel, "phi_error": phi_err, "mu_error": mu_err}

    return ExperimentBundle(
        name="mixture",
        param_names=tuple(f"phi_{i}" for i in range(k)) + tuple(f"mu_{i}" for i in range(k)),
        truth=np.concatenate([truth_phi, truth_mu]),
        make_observed=make_observed,
        make_config=make_config,
        to_natural=lambda raw: _mixture_project(raw, k),
        metrics=metrics,
    )


def conjugate_oracle_bundle(
    true_theta: float = 1.0,
    prior_mean: float = 0.0,
    prior_var: float = 100.0,
    obs_var: float = 1.0,
    n_obs: int = 5,
    n_particles: int = 40,
    n_iterations: int = 8,
    delta: float = 5e-2,
    pool_size: int = 60,
    refine_steps: int = 3,
    y_multiplier: float = 1.0,
    theta_multiplier: float = 1.0,
) -> ExperimentBundle:
    """1-D conjugate Gaussian problem with an analytic MLE to compare against."""
    truth = np.array([float(true_theta)])
    prior = PriorSpec(kind="normal-product", means=np.array([prior_mean]), sds=np.array([np.sqrt(prior_var)]))
    spec = SimulatorSpec(
        name="conjugate-gaussian",
        param_dim=1,
        obs_dim=1,
        fn=lambda theta, seed: sim_gaussian_mean(theta, n_obs, obs_var, seed),
        fixed_params={"obs_var": obs_var, "n_obs": n_obs},
    )

    def make_observed(trial_seed):
        return sim_gaussian_mean(truth, n_obs, obs_var, derive_seed(trial_seed, "observed"))

    def make_config(observed, trial_seed):
        return RunConfig(
            simulator=spec,
            prior=prior,
            summarizer=Summarizer(kind="mean"),
            n_particles=n_particles,
            n_iterations=n_iterations,
            delta=delta,
            master_seed=trial_seed,
            y_bandwidth=BandwidthPolicy(kind="median", multiplier=y_multiplier),
            theta_bandwidth=BandwidthPolicy(kind="median", multiplier=theta_multiplier),
            search=_search(pool_size, refine_steps),
        )

    def metrics(estimate, observed):
        mle = float(np.mean(observed))
        return {
            "param_error": parameter_error(estimate, truth),
            "mle_error": float(abs(estimate[0] - mle)),
        }

    return ExperimentBundle(
        name="conjugate-oracle",
        param_names=("theta",),
        truth=truth,
        make_observed=make_observed,
        make_config=make_config,
        to_natural=lambda raw: np.asarray(raw, dtype=float).copy(),
        metrics=metrics,
    )


def custom_bundle(
    simulator: dict,
    prior: dict,
    summarizer: dict,
    truth,
    n_particles: int = 50,
    n_iterations: int = 5,
    delta: float = 1e-3,
    pool_size: int = 150,
    refine_steps: int = 6,
    y_multiplier: float = 1.0,
    theta_multiplier: float = 1.0,
) -> ExperimentBundle:
    """Experiment assembled from declarative simulator/prior/summarizer specs."""
    truth = np.asarray(truth, dtype=float).ravel()
    spec = simulator_from_dict(simulator)
    prior_spec = prior_from_dict(prior)
    summ = summarizer_from_dict(summarizer)
    if spec.param_dim != truth.shape[0]:
        raise ValueError(f"truth has dimension {truth.shape[0]}, simulator expects {spec.param_dim}")

    def make_observed(trial_seed):
        return spec.simulate(truth, derive_seed(trial_seed, "observed"))

    def make_config(observed, trial_seed):
        return RunConfig(
            simulator=spec,
            prior=prior_spec,
            summarizer=summ,
            n_particles=n_particles,
            n_iterations=n_iterations,
            delta=delta,
            master_seed=trial_seed,
            y_bandwidth=BandwidthPolicy(kind="median", multiplier=y_multiplier),
            theta_bandwidth=BandwidthPolicy(kind="median", multiplier=theta_multiplier),
            search=_search(pool_size, refine_steps),
        )

    def metrics(estimate, observed):
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return {"param_error": parameter_error(estimate, truth)}

    return ExperimentBundle(
        name="custom",
        param_names=tuple(f"theta_{i}" for i in range(spec.param_dim)),
        truth=truth,
        make_observed=make_observed,
        make_config=make_config,
        to_natural=lambda raw: np.asarray(raw, dtype=float).copy(),
        metrics=metrics,
    )


def simulator_from_dict(payload: dict) -> SimulatorSpec:
    """Build a built-in simulator from its config-file description."""
    payload = dict(payload)
    name = payload.pop("name", None)
    if name == "identity":
        return make_identity_spec(dim=int(payload.pop("dim", 1)), n_obs=int(payload.pop("n_obs", 1)))
    if name == "gaussian-mean":
        dim = int(payload.pop("dim", 1))
        n_obs = int(payload.pop("n_obs", 100))
        cov_diag = float(payload.pop("cov_diag", 1.0))
        return SimulatorSpec(
            name="gaussian-mean",
            param_dim=dim,
            obs_dim=dim,
            fn=lambda theta, seed: sim_gaussian_mean(theta, n_obs, cov_diag, seed),
            fixed_params={"cov_diag": cov_diag, "n_obs": n_obs},
        )
    raise ValueError(f"unknown simulator name {name!r} (expected 'identity' or 'gaussian-mean')")


def prior_from_dict(payload: dict) -> PriorSpec:
    payload = dict(payload)
    kind = payload.pop("kind", None)
    if kind == "uniform-box":
        return PriorSpec(kind="uniform-box", bounds=np.asarray(payload.pop("bounds"), dtype=float))
    if kind == "normal-product":
        return PriorSpec(
            kind="normal-product",
            means=np.asarray(payload.pop("means"), dtype=float),
            sds=np.asarray(payload.pop("sds"), dtype=float),
        )
    if kind == "log-normal-product":
        return PriorSpec(
            kind="log-normal-product",
            locs=np.asarray(payload.pop("locs"), dtype=float),
            scales=np.asarray(payload.pop("scales"), dtype=float),
        )
    if kind == "dirichlet-scaled":
        return PriorSpec(
            kind="dirichlet-scaled",
            concentrations=np.asarray(payload.pop("concentrations"), dtype=float),
            scale=float(payload.pop("scale", 1.0)),
        )
    raise ValueError(f"unknown prior kind {kind!r}")


def summarizer_from_dict(payload: dict) -> Summarizer:
    payload = dict(payload)
    kind = payload.pop("kind", None)
    if kind in ("mean", "identity"):
        return Summarizer(kind=kind)
    if kind == "histogram":
        rng_ = payload.pop("range")
        return Summarizer(kind="histogram", bins=int(payload.pop("bins")), range=(float(rng_[0]), float(rng_[1])))
    raise ValueError(f"unknown summarizer kind {kind!r}")


EXPERIMENTS: dict[str, Callable[..., ExperimentBundle]] = {
    "gauss-misspecified": gauss_misspecified_bundle,
    "blowfly": blowfly_bundle,
    "alpha-stable": alpha_stable_bundle,
    "mixture": mixture_bundle,
    "conjugate-oracle": conjugate_oracle_bundle,
    "custom": custom_bundle,
}

# Trial counts by scale; everything else already matches the source settings.
DEFAULT_TRIALS = {
    "desk": {
        "gauss-misspecified": 5,
        "blowfly": 5,
        "alpha-stable": 10,
        "mixture": 5,
        "conjugate-oracle": 20,
        "custom": 2,
    },
    "paper": {
        "gauss-misspecified": 30,
        "blowfly": 30,
        "alpha-stable": 30,
        "mixture": 30,
        "conjugate-oracle": 30,
        "custom": 10,
    },
}


def get_experiment(name: str, **overrides) -> ExperimentBundle:
    """Instantiate a named experiment with optional keyword overrides."""
    if name not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {name!r}; choose from {sorted(EXPERIMENTS)}")
    return EXPERIMENTS[name](**overrides)
