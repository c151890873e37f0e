"""krabc: likelihood-free point estimation by recursive kernel ABC + herding."""

from .kernels import (
    DegenerateBandwidthError,
    KernelConfig,
    bandwidth_grid,
    gaussian_kernel,
    gram_matrix,
    kernel_matrix,
    median_heuristic,
)
from .discrepancy import energy_distance_linear, energy_distance_quadratic, mmd_quadratic
from .kabc import (
    DegenerateWeightsWarning,
    GramSolveError,
    WeightedParticleSet,
    embed_posterior,
    kabc_weights,
    mmd_to_embedding,
    posterior_mean,
)
from .herding import HerdingDiagnostics, SearchConfig, herd, herding_objective
from .models import (
    PriorSpec,
    SimulationDivergedError,
    SimulatorSpec,
    Summarizer,
    blowfly_step,
    cms_scale,
    cms_shift,
    cms_tau,
    make_identity_spec,
    sample_prior,
    sim_alpha_stable,
    sim_blowfly,
    sim_gaussian_mean,
    sim_gaussian_mixture,
    summarize,
)
from .driver import (
    BandwidthPolicy,
    IterationRecord,
    RunAbortedError,
    RunConfig,
    RunTrace,
    SearchSettings,
    SelectionError,
    parameter_error,
    run_krabc,
    select_hyperparameters,
    sorted_mixture_error,
)
from .oracle import (
    ConjugateProblem,
    kernel_mean_gaussian,
    powered_posterior_params,
    proposition2_check,
)
from .experiments import ExperimentBundle, get_experiment
from .config import ConfigError, ExperimentConfig, load_config, save_config
from .harness import ResultRecord, run_experiment, validate
from .seeding import derive_rng, derive_seed

__version__ = "0.1.0"

__all__ = [
    "BandwidthPolicy",
    "ConfigError",
    "ConjugateProblem",
    "DegenerateBandwidthError",
    "DegenerateWeightsWarning",
    "ExperimentBundle",
    "ExperimentConfig",
    "GramSolveError",
    "HerdingDiagnostics",
    "IterationRecord",
    "KernelConfig",
    "PriorSpec",
    "ResultRecord",
    "RunAbortedError",
    "RunConfig",
    "RunTrace",
    "SearchConfig",
    "SearchSettings",
    "SelectionError",
    "SimulationDivergedError",
    "SimulatorSpec",
    "Summarizer",
    "WeightedParticleSet",
    "bandwidth_grid",
    "blowfly_step",
    "cms_scale",
    "cms_shift",
    "cms_tau",
    "derive_rng",
    "derive_seed",
    "embed_posterior",
    "energy_distance_linear",
    "energy_distance_quadratic",
    "gaussian_kernel",
    "get_experiment",
    "gram_matrix",
    "herd",
    "herding_objective",
    "kabc_weights",
    "kernel_matrix",
    "kernel_mean_gaussian",
    "load_config",
    "make_identity_spec",
    "median_heuristic",
    "mmd_quadratic",
    "mmd_to_embedding",
    "parameter_error",
    "posterior_mean",
    "powered_posterior_params",
    "proposition2_check",
    "run_experiment",
    "run_krabc",
    "sample_prior",
    "save_config",
    "select_hyperparameters",
    "sim_alpha_stable",
    "sim_blowfly",
    "sim_gaussian_mean",
    "sim_gaussian_mixture",
    "sorted_mixture_error",
    "summarize",
    "validate",
]
