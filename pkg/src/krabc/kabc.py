"""Kernel ABC: posterior kernel-mean weights via ridge regression in the RKHS.

Given simulated pairs (theta_i, y_i) and an observation y*, the posterior
embedding is estimated as sum_i w_i k(., theta_i) with

    w = (G + n * delta * I)^{-1} kvec,

where G is the Gram matrix of the simulated data under the data-space kernel
and kvec holds the kernel similarities of each y_i to y*.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .kernels import KernelConfig, kernel_matrix, gram_matrix


class GramSolveError(RuntimeError):
    """Regularized Gram solve failed or left a large residual."""


class DegenerateWeightsWarning(UserWarning):
    """Posterior weights sum to (nearly) zero; mean falls back to unweighted."""


@dataclass(frozen=True)
class WeightedParticleSet:
    """Empirical kernel mean ``sum_i weights[i] * k(., particles[i])``.

    Weights come from the ridge solve and may be negative; they are neither
    clipped nor normalized.
    """

    particles: np.ndarray
    weights: np.ndarray
    kernel_cfg: KernelConfig

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.particles, dtype=float))
        w = np.asarray(self.weights, dtype=float).ravel()
        if pts.shape[0] != w.shape[0] or pts.shape[0] == 0:
            raise ValueError(f"got {pts.shape[0]} particles and {w.shape[0]} weights")
        if not (np.isfinite(pts).all() and np.isfinite(w).all()):
            raise ValueError("particles and weights must be finite")
        object.__setattr__(self, "particles", pts)
        object.__setattr__(self, "weights", w)

    @property
    def sum_weights(self) -> float:
        """Signed weight total; collapses toward 0 when all simulations miss."""
        return float(np.sum(self.weights))

    @property
    def dim(self) -> int:
        return self.particles.shape[1]

    def __len__(self) -> int:
        return self.particles.shape[0]


def kabc_weights(gram: np.ndarray, kvec: np.ndarray, delta: float) -> np.ndarray:
    """Solve ``(G + n * delta * I) w = kvec`` for the posterior weights.

    The system is symmetric positive definite for delta > 0 and solved by
    Cholesky factorization; one step of iterative refinement is applied if the
    residual exceeds ``1e-8 * (1 + ||kvec||)``, and :class:`GramSolveError`
    (with conditioning diagnostics) is raised if it still does.
    """
    g = np.asarray(gram, dtype=float)
    k = np.asarray(kvec, dtype=float).ravel()
    n = k.shape[0]
    if g.shape != (n, n):
        raise ValueError(f"gram must be {n}x{n} to match kvec, got {g.shape}")
    if not (delta > 0):
        raise ValueError(f"delta must be positive, got {delta}")
    if not (np.isfinite(g).all() and np.isfinite(k).all()):
        raise GramSolveError("non-finite entries in gram matrix or kernel vector")

    a = g + n * delta * np.eye(n)
    try:
        factor = cho_factor(a, lower=True)
    except LinAlgError as exc:
        eigs = np.linalg.eigvalsh(a)
        raise GramSolveError(
            f"Cholesky factorization failed: eigenvalue range [{eigs[0]:.3e}, {eigs[-1]:.3e}]"
        ) from exc
    w = cho_solve(factor, k)
    tol = 1e-8 * (1.0 + float(np.linalg.norm(k)))
    resid = k - a @ w
    if float(np.linalg.norm(resid)) > tol:
        w = w + cho_solve(factor, resid)
        resid_norm = float(np.linalg.norm(k - a @ w))
        if not np.isfinite(w).all() or resid_norm > tol:
            eigs = np.linalg.eigvalsh(a)
            raise GramSolveError(
                f"solve residual {resid_norm:.3e} exceeds tolerance {tol:.3e}; "
                f"eigenvalue range [{eigs[0]:.3e}, {eigs[-1]:.3e}]"
            )
    return w


def embed_posterior(
    sim_params,
    sim_summaries,
    observed_summary,
    ky_cfg: KernelConfig,
    ktheta_cfg: KernelConfig,
    delta: float,
) -> WeightedParticleSet:
    """Posterior kernel-mean estimate from simulated pairs and an observation.

    ``sim_summaries`` and ``observed_summary`` are the fixed-length summary
    vectors of the simulated and observed datasets (see the summarizers in
    :mod:`krabc.models`).
    """
    params = np.atleast_2d(np.asarray(sim_params, dtype=float))
    summaries = np.atleast_2d(np.asarray(sim_summaries, dtype=float))
    obs = np.asarray(observed_summary, dtype=float).ravel()
    n = params.shape[0]
    if summaries.shape[0] != n or n < 2:
        raise ValueError(f"need >= 2 matched (param, summary) pairs, got {n} and {summaries.shape[0]}")
    if summaries.shape[1] != obs.shape[0]:
        raise ValueError(
            f"summary dimension mismatch: simulated {summaries.shape[1]}, observed {obs.shape[0]}"
        )
    g = gram_matrix(summaries, ky_cfg)
    kvec = kernel_matrix(summaries, obs.reshape(1, -1), ky_cfg).ravel()
    w = kabc_weights(g, kvec, delta)
    return WeightedParticleSet(particles=params, weights=w, kernel_cfg=ktheta_cfg)


def posterior_mean(ps: WeightedParticleSet) -> np.ndarray:
    """Weighted particle mean ``sum w_i theta_i / sum w_i``.

    When the weights sum to (almost) zero the ratio is meaningless; the
    unweighted mean is returned and :class:`DegenerateWeightsWarning` emitted.
    """
    total = ps.sum_weights
    if abs(total) < 1e-12:
        warnings.warn(
            "weights sum to ~0; returning unweighted particle mean",
            DegenerateWeightsWarning,
            stacklevel=2,
        )
        return ps.particles.mean(axis=0)
    return (ps.weights @ ps.particles) / total


def mmd_to_embedding(ps: WeightedParticleSet, points) -> float:
    """RKHS distance between an embedding and the uniform mean of a point set.

    Computes ``|| sum_i w_i k(., theta_i) - (1/m) sum_j k(., x_j) ||`` in the
    RKHS of ``ps.kernel_cfg``; this is the herding objective value epsilon_m.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    m = pts.shape[0]
    cfg = ps.kernel_cfg
    w = ps.weights
    term_ss = float(w @ gram_matrix(ps.particles, cfg) @ w)
    term_sx = float(w @ kernel_matrix(ps.particles, pts, cfg).sum(axis=1)) / m
    term_xx = float(np.sum(gram_matrix(pts, cfg))) / m**2
    return float(np.sqrt(max(term_ss - 2.0 * term_sx + term_xx, 0.0)))
