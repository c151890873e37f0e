"""Analytic conjugate-Gaussian oracles used to validate the recursion.

For a Normal likelihood with known variance and a Normal prior, the
recursively re-applied posterior (prior times likelihood to the N-th power)
stays Gaussian, so its kernel mean under a Gaussian kernel and the herding
first-point read-out have closed forms. Tests compare the full pipeline
against these.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import KernelConfig


@dataclass(frozen=True)
class ConjugateProblem:
    """Normal prior (prior_mean, prior_var), Normal likelihood with obs_var."""

    prior_mean: float
    prior_var: float
    obs_var: float
    observations: np.ndarray

    def __post_init__(self):
        obs = np.asarray(self.observations, dtype=float).ravel()
        if obs.shape[0] < 1:
            raise ValueError("need at least one observation")
        if self.prior_var <= 0 or self.obs_var <= 0:
            raise ValueError("variances must be positive")
        object.__setattr__(self, "observations", obs)

    @property
    def mle(self) -> float:
        return float(np.mean(self.observations))


def powered_posterior_params(p: ConjugateProblem, n_recursions: int) -> tuple[float, float]:
    """Mean and variance of the posterior after N recursive Bayes updates.

    Each recursion multiplies in the full likelihood of the m observations
    once more, so the precision is ``1/s0^2 + N m / sigma^2``. N = 0 returns
    the prior; as N grows the distribution degenerates at the MLE.
    """
    if n_recursions < 0:
        raise ValueError("n_recursions must be >= 0")
    m = p.observations.shape[0]
    precision = 1.0 / p.prior_var + n_recursions * m / p.obs_var
    mean = (p.prior_mean / p.prior_var + n_recursions * m * p.mle / p.obs_var) / precision
    return float(mean), float(1.0 / precision)


def kernel_mean_gaussian(meanvar: tuple[float, float], cfg: KernelConfig, theta: float) -> float:
    """Kernel mean of a Gaussian distribution evaluated at ``theta``.

    For bandwidth s and distribution Normal(mu, v) the Gaussian convolution
    gives ``s / sqrt(s^2 + v) * exp(-(theta - mu)^2 / (2 (s^2 + v)))``; v = 0
    reduces to the kernel itself.
    """
    mu, v = float(meanvar[0]), float(meanvar[1])
    if v < 0:
        raise ValueError("variance must be >= 0")
    s2 = cfg.bandwidth**2
    return float(cfg.bandwidth / np.sqrt(s2 + v) * np.exp(-((theta - mu) ** 2) / (2.0 * (s2 + v))))


def proposition2_check(
    p: ConjugateProblem,
    cfg: KernelConfig,
    n_list,
    grid,
) -> list[tuple[int, float]]:
    """Grid argmax of the powered-posterior kernel mean for each recursion depth.

    Returns ``[(N, argmax_theta), ...]``; the argmax should march toward the
    MLE as N grows (the first-herded-point consistency statement).
    """
    grid = np.asarray(grid, dtype=float).ravel()
    if grid.min() > p.mle or grid.max() < p.mle:
        raise ValueError("grid must cover the MLE")
    out = []
    for n in n_list:
        mv = powered_posterior_params(p, n)
        vals = np.array([kernel_mean_gaussian(mv, cfg, th) for th in grid])
        out.append((int(n), float(grid[int(np.argmax(vals))])))
    return out
