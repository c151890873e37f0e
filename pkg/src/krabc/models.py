"""Built-in stochastic simulators, priors, and data summarizers.

Every simulator is a pure function of (theta, config, seed): repeated calls
with the same arguments return bit-identical datasets. Datasets are (n_obs, p)
row stacks of observations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .seeding import derive_rng


class SimulationDivergedError(RuntimeError):
    """The simulated system left the representable range (overflow/NaN)."""


@dataclass(frozen=True)
class SimulatorSpec:
    """A seeded stochastic map theta -> dataset plus search metadata.

    bounds are per-dimension (lo, hi) limits of the parameterization the
    driver searches in (may be +-inf); integer_mask marks coordinates that the
    simulator rounds internally (they are herded in continuous space).
    """

    name: str
    param_dim: int
    obs_dim: int
    fn: Callable[[np.ndarray, int], np.ndarray]
    bounds: np.ndarray | None = None
    integer_mask: np.ndarray | None = None
    fixed_params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.param_dim < 1 or self.obs_dim < 1:
            raise ValueError("param_dim and obs_dim must be >= 1")
        if self.bounds is not None:
            b = np.asarray(self.bounds, dtype=float)
            if b.shape != (self.param_dim, 2):
                raise ValueError(f"bounds must have shape ({self.param_dim}, 2), got {b.shape}")
            object.__setattr__(self, "bounds", b)

    def simulate(self, theta, seed: int) -> np.ndarray:
        theta = np.asarray(theta, dtype=float).ravel()
        if theta.shape[0] != self.param_dim:
            raise ValueError(f"theta has dimension {theta.shape[0]}, expected {self.param_dim}")
        return self.fn(theta, seed)


# ---------------------------------------------------------------------------
# Simulators
# ---------------------------------------------------------------------------


def sim_gaussian_mean(theta, n_obs: int, cov_diag: float, seed: int) -> np.ndarray:
    """i.i.d. draws from Normal(theta, cov_diag * I)."""
    mean = np.asarray(theta, dtype=float).ravel()
    if n_obs < 1:
        raise ValueError("n_obs must be >= 1")
    if cov_diag <= 0:
        raise ValueError("cov_diag must be positive")
    rng = np.random.default_rng(seed)
    return mean + np.sqrt(cov_diag) * rng.standard_normal((n_obs, mean.shape[0]))


def blowfly_step(p: float, n0: float, delta: float, n_lag: float, n_cur: float, e: float, eps: float) -> float:
    """One update of the blowfly population recurrence."""
    return p * n_lag * np.exp(-n_lag / n0) * e + n_cur * np.exp(-delta * eps)


def sim_blowfly(theta, t_len: int, burn_in: int = 50, seed: int = 0) -> np.ndarray:
    """Blowfly population dynamics with multiplicative Gamma noise.

    theta = (P, N0, sigma_d, sigma_p, tau, delta); P, N0, tau are rounded to
    positive integers from their continuous values. The per-step noises
    e_t ~ Gamma(1/sigma_p^2, sigma_p^2) and eps_t ~ Gamma(1/sigma_d^2,
    sigma_d^2) are shape/scale parameterized so both have mean one. The paper
    leaves initial conditions open: the first tau+1 populations are set to
    100 times mean-one Exp(1) draws and ``burn_in`` steps are discarded.

    Returns the final ``t_len`` populations as a (t_len, 1) dataset.
    """
    p, n0, sigma_d, sigma_p, tau, delta = np.asarray(theta, dtype=float).ravel()
    if t_len < 1:
        raise ValueError("t_len must be >= 1")
    if sigma_d <= 0 or sigma_p <= 0 or delta <= 0:
        raise ValueError("sigma_d, sigma_p and delta must be positive")
    p = max(1.0, np.rint(p))
    n0 = max(1.0, np.rint(n0))
    lag = int(min(max(1.0, np.rint(tau)), 1000.0))

    rng = np.random.default_rng(seed)
    total = burn_in + t_len
    init = 100.0 * rng.gamma(1.0, 1.0, size=lag + 1)
    e = rng.gamma(1.0 / sigma_p**2, sigma_p**2, size=total)
    eps = rng.gamma(1.0 / sigma_d**2, sigma_d**2, size=total)

    series = np.empty(lag + 1 + total)
    series[: lag + 1] = init
    for i in range(total):
        t = lag + i
        series[t + 1] = blowfly_step(p, n0, delta, series[t - lag], series[t], e[i], eps[i])
    if not np.isfinite(series).all():
        raise SimulationDivergedError("blowfly population overflowed")
    return series[-t_len:].reshape(-1, 1)


def cms_shift(alpha: float, beta: float) -> float:
    """B term of the Chambers-Mallows-Stuck map: arctan(beta tan(pi alpha/2)) / alpha."""
    return float(np.arctan(beta * np.tan(np.pi * alpha / 2.0)) / alpha)


def cms_scale(alpha: float, beta: float) -> float:
    """S term of the Chambers-Mallows-Stuck map: (1 + beta^2 tan^2(pi alpha/2))^(1/(2 alpha))."""
    return float((1.0 + beta**2 * np.tan(np.pi * alpha / 2.0) ** 2) ** (1.0 / (2.0 * alpha)))


def cms_tau(u1, u2, alpha: float, beta: float = 0.0, mu: float = 0.0, sigma: float = 1.0):
    """Chambers-Mallows-Stuck transform of Unif(-pi/2, pi/2) and Exp(1) draws.

    Produces alpha-stable variates ``sigma * tau_{alpha,beta}(u1, u2) + mu``.
    Vectorized over u1, u2.
    """
    u1 = np.asarray(u1, dtype=float)
    u2 = np.asarray(u2, dtype=float)
    if not 0.0 < alpha <= 2.0:
        raise ValueError(f"alpha must be in (0, 2], got {alpha}")
    if not -1.0 <= beta <= 1.0:
        raise ValueError(f"beta must be in [-1, 1], got {beta}")
    if alpha == 1.0:
        half_pi = np.pi / 2.0
        core = (half_pi + beta * u1) * np.tan(u1) - beta * np.log(
            (u2 * np.cos(u1)) / (half_pi + beta * u1)
        )
        out = (2.0 / np.pi) * core
    else:
        b = cms_shift(alpha, beta)
        s = cms_scale(alpha, beta)
        shifted = alpha * (u1 + b)
        out = (
            s
            * (np.sin(shifted) / np.cos(u1) ** (1.0 / alpha))
            * (np.cos(u1 - shifted) / u2) ** ((1.0 - alpha) / alpha)
        )
    return sigma * out + mu


def _compound_symmetric(d: int, q_diag: float, q_offdiag: float) -> np.ndarray:
    q = np.full((d, d), q_offdiag)
    np.fill_diagonal(q, q_diag)
    return q


def sim_alpha_stable(
    theta,
    d: int,
    n_obs: int,
    seed: int,
    amplitude: str = "verbatim",
    max_retries: int = 100,
) -> np.ndarray:
    """Elliptically contoured alpha-stable draws ``sqrt(A) * G``.

    theta = (alpha, q_diag, q_offdiag). G ~ Normal(0, Q) with Q compound
    symmetric; the random amplitude A comes from the CMS map with beta = 1,
    mu = 0, sigma = 1 (shift delta fixed to zero). ``amplitude="verbatim"``
    applies the map at index alpha; ``amplitude="half-index"`` uses the
    classical positive alpha/2-stable amplitude with scale
    ``2 * cos(pi alpha / 4)^(2/alpha)``. Nonpositive or non-finite amplitude
    draws are resampled, at most ``max_retries`` sweeps.
    """
    alpha, q_diag, q_offdiag = np.asarray(theta, dtype=float).ravel()
    if not 0.0 < alpha <= 2.0:
        raise ValueError(f"alpha must be in (0, 2], got {alpha}")
    if q_diag <= 0 or q_diag - q_offdiag <= 0 or q_diag + (d - 1) * q_offdiag <= 0:
        raise ValueError(
            f"Q must be positive definite: q_diag={q_diag}, q_offdiag={q_offdiag}, d={d}"
        )
    if amplitude not in ("verbatim", "half-index"):
        raise ValueError(f"unknown amplitude variant {amplitude!r}")

    rng = np.random.default_rng(seed)
    if amplitude == "verbatim":
        amp_args = dict(alpha=alpha, beta=1.0, mu=0.0, sigma=1.0)
    else:
        amp_args = dict(
            alpha=alpha / 2.0,
            beta=1.0,
            mu=0.0,
            sigma=2.0 * np.cos(np.pi * alpha / 4.0) ** (2.0 / alpha),
        )

    amps = np.full(n_obs, np.nan)
    pending = np.ones(n_obs, dtype=bool)
    for _ in range(max_retries):
        m = int(pending.sum())
        if m == 0:
            break
        u1 = rng.uniform(-np.pi / 2.0, np.pi / 2.0, size=m)
        u2 = rng.exponential(1.0, size=m)
        draw = cms_tau(u1, u2, **amp_args)
        good = np.isfinite(draw) & (draw > 0)
        idx = np.flatnonzero(pending)[good]
        amps[idx] = draw[good]
        pending[idx] = False
    if pending.any():
        raise SimulationDivergedError(
            f"amplitude resampling exhausted {max_retries} sweeps for {int(pending.sum())} draws"
        )

    chol = np.linalg.cholesky(_compound_symmetric(d, q_diag, q_offdiag))
    g = rng.standard_normal((n_obs, d)) @ chol.T
    return np.sqrt(amps)[:, None] * g


def sim_gaussian_mixture(phi, mu, sd: float, n_obs: int, seed: int) -> np.ndarray:
    """Univariate Gaussian mixture draws: component by phi, then Normal(mu_i, sd^2)."""
    phi = np.asarray(phi, dtype=float).ravel()
    mu = np.asarray(mu, dtype=float).ravel()
    if phi.shape != mu.shape:
        raise ValueError(f"phi and mu must match, got {phi.shape} and {mu.shape}")
    if np.any(phi < 0) or abs(phi.sum() - 1.0) > 1e-9:
        raise ValueError(f"phi must be a probability vector, got sum {phi.sum()!r}")
    if sd <= 0:
        raise ValueError("sd must be positive")
    rng = np.random.default_rng(seed)
    comp = rng.choice(phi.shape[0], size=n_obs, p=phi / phi.sum())
    return (mu[comp] + sd * rng.standard_normal(n_obs)).reshape(-1, 1)


def make_identity_spec(dim: int, n_obs: int = 1, bounds=None) -> SimulatorSpec:
    """Noiseless test simulator: the dataset is n_obs copies of theta."""

    def fn(theta, seed):
        return np.tile(np.asarray(theta, dtype=float).ravel(), (n_obs, 1))

    return SimulatorSpec(name="identity", param_dim=dim, obs_dim=dim, fn=fn, bounds=bounds)


# ---------------------------------------------------------------------------
# Priors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PriorSpec:
    """Parametric prior over the search space.

    kinds:
      uniform-box        params: bounds (d, 2)
      normal-product     params: means (d,), sds (d,)
      log-normal-product params: locs (d,), scales (d,)  [exp of a normal product]
      dirichlet-scaled   params: concentrations (k,), scale (default 1.0)
      composite          params: blocks = sequence of PriorSpec, concatenated

    ``constraint`` optionally rejects draws (redrawn with the same generator,
    capped) -- used e.g. to keep covariance parameters positive definite.
    """

    kind: str
    bounds: np.ndarray | None = None
    means: np.ndarray | None = None
    sds: np.ndarray | None = None
    locs: np.ndarray | None = None
    scales: np.ndarray | None = None
    concentrations: np.ndarray | None = None
    scale: float = 1.0
    blocks: tuple = ()
    constraint: Callable[[np.ndarray], bool] | None = None

    def __post_init__(self):
        def setarr(name):
            val = getattr(self, name)
            if val is not None:
                object.__setattr__(self, name, np.asarray(val, dtype=float))

        for name in ("bounds", "means", "sds", "locs", "scales", "concentrations"):
            setarr(name)
        if self.kind == "uniform-box":
            b = self.bounds
            if b is None or b.ndim != 2 or b.shape[1] != 2 or not np.isfinite(b).all():
                raise ValueError("uniform-box prior needs finite (d, 2) bounds")
            if np.any(b[:, 0] >= b[:, 1]):
                raise ValueError("uniform-box bounds must satisfy lo < hi")
        elif self.kind == "normal-product":
            if self.means is None or self.sds is None or np.any(self.sds <= 0):
                raise ValueError("normal-product prior needs means and positive sds")
        elif self.kind == "log-normal-product":
            if self.locs is None or self.scales is None or np.any(self.scales <= 0):
                raise ValueError("log-normal-product prior needs locs and positive scales")
        elif self.kind == "dirichlet-scaled":
            c = self.concentrations
            if c is None or np.any(c <= 0):
                raise ValueError("dirichlet-scaled prior needs positive concentrations")
        elif self.kind == "composite":
            if not self.blocks:
                raise ValueError("composite prior needs at least one block")
        else:
            raise ValueError(f"unknown prior kind {self.kind!r}")

    @property
    def dim(self) -> int:
        if self.kind == "uniform-box":
            return self.bounds.shape[0]
        if self.kind == "normal-product":
            return self.means.shape[0]
        if self.kind == "log-normal-product":
            return self.locs.shape[0]
        if self.kind == "dirichlet-scaled":
            return self.concentrations.shape[0]
        return sum(b.dim for b in self.blocks)


def _draw_prior(spec: PriorSpec, rng: np.random.Generator) -> np.ndarray:
    if spec.kind == "uniform-box":
        return rng.uniform(spec.bounds[:, 0], spec.bounds[:, 1])
    if spec.kind == "normal-product":
        return spec.means + spec.sds * rng.standard_normal(spec.dim)
    if spec.kind == "log-normal-product":
        return np.exp(spec.locs + spec.scales * rng.standard_normal(spec.dim))
    if spec.kind == "dirichlet-scaled":
        return spec.scale * rng.dirichlet(spec.concentrations)
    return np.concatenate([_draw_prior(b, rng) for b in spec.blocks])


def sample_prior(spec: PriorSpec, seed: int, max_rejects: int = 1000) -> np.ndarray:
    """One parameter draw; deterministic per seed."""
    rng = np.random.default_rng(seed)
    for _ in range(max_rejects):
        theta = _draw_prior(spec, rng)
        if spec.constraint is None or spec.constraint(theta):
            return theta
    raise RuntimeError(f"prior constraint rejected {max_rejects} consecutive draws")


# ---------------------------------------------------------------------------
# Summarizers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Summarizer:
    """Reduction of a dataset to the fixed-length vector fed to data kernels.

    kinds:
      mean       column means of the observations
      histogram  frequencies over ``bins`` equal bins per dimension spanning
                 ``range`` (a product grid for multivariate observations);
                 out-of-range observations are clipped into the edge bins
      identity   flattened observations (for data that is already a summary)
    """

    kind: str
    bins: int = 0
    range: tuple[float, float] | None = None

    def __post_init__(self):
        if self.kind not in ("mean", "histogram", "identity"):
            raise ValueError(f"unknown summarizer kind {self.kind!r}")
        if self.kind == "histogram":
            if self.bins < 1:
                raise ValueError(f"histogram needs bins >= 1, got {self.bins}")
            if self.range is None:
                raise ValueError("histogram needs an explicit (lo, hi) range")
            lo, hi = float(self.range[0]), float(self.range[1])
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                raise ValueError(f"histogram range must be finite with lo < hi, got {self.range}")
            object.__setattr__(self, "range", (lo, hi))


def summarize(data, s: Summarizer) -> np.ndarray:
    """Apply a summarizer to a dataset, returning a 1-D summary vector."""
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise ValueError("dataset must be a nonempty (n, p) array")
    if s.kind == "mean":
        return arr.mean(axis=0)
    if s.kind == "identity":
        return arr.ravel()
    lo, hi = s.range
    p = arr.shape[1]
    if s.bins**p > 200_000:
        raise ValueError(f"histogram grid of {s.bins}^{p} bins is too large")
    clipped = np.clip(arr, lo, hi)
    if p == 1:
        counts, _ = np.histogram(clipped[:, 0], bins=s.bins, range=(lo, hi))
    else:
        counts, _ = np.histogramdd(clipped, bins=[s.bins] * p, range=[(lo, hi)] * p)
        counts = counts.ravel()
    return counts / arr.shape[0]
