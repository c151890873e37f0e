"""Gaussian kernel evaluation, Gram matrices, and bandwidth selection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist, pdist


class DegenerateBandwidthError(ValueError):
    """Raised when all pairwise distances are zero and no bandwidth exists.

    Callers that track a previously valid bandwidth should fall back to it;
    a silent constant fallback would mask simulator collapse.
    """


# Fixed seed for the pair subsample in median_heuristic: the heuristic must be
# reproducible and independent of any caller RNG state.
_SUBSAMPLE_SEED = 0x5EED
_SUBSAMPLE_LIMIT = 2000


@dataclass(frozen=True)
class KernelConfig:
    """Gaussian kernel ``k(x, y) = exp(-||x - y||^2 / (2 * bandwidth^2))``.

    The convention fixes ``k(x, x) = 1`` and ``0 < k(x, y) <= 1`` with
    equality iff ``x == y``.
    """

    bandwidth: float

    def __post_init__(self):
        bw = float(self.bandwidth)
        if not np.isfinite(bw) or bw <= 0:
            raise ValueError(f"bandwidth must be a positive finite real, got {self.bandwidth!r}")
        object.__setattr__(self, "bandwidth", bw)


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError("expected a nonempty (n, d) array of points")
    return pts


def gaussian_kernel(x, y, cfg: KernelConfig) -> float:
    """Evaluate the Gaussian kernel between two vectors.

    Raises ValueError on dimension mismatch. Symmetric in its arguments.
    """
    xv = np.asarray(x, dtype=float).ravel()
    yv = np.asarray(y, dtype=float).ravel()
    if xv.shape != yv.shape:
        raise ValueError(f"dimension mismatch: {xv.shape} vs {yv.shape}")
    sq = float(np.dot(xv - yv, xv - yv))
    return float(np.exp(-sq / (2.0 * cfg.bandwidth**2)))


def kernel_matrix(a, b, cfg: KernelConfig) -> np.ndarray:
    """Cross kernel matrix ``K[i, j] = k(a_i, b_j)`` for row stacks a, b."""
    av = _as_points(a)
    bv = _as_points(b)
    if av.shape[1] != bv.shape[1]:
        raise ValueError(f"dimension mismatch: {av.shape[1]} vs {bv.shape[1]}")
    sq = cdist(av, bv, metric="sqeuclidean")
    return np.exp(-sq / (2.0 * cfg.bandwidth**2))


def gram_matrix(points, cfg: KernelConfig) -> np.ndarray:
    """Gram matrix of a point set: symmetric, unit diagonal, PSD."""
    pts = _as_points(points)
    return kernel_matrix(pts, pts, cfg)


def median_heuristic(points, max_points: int = _SUBSAMPLE_LIMIT) -> float:
    """Median of pairwise Euclidean distances of a point set.

    Above ``max_points`` points the median is taken over a fixed-seed uniform
    subsample to bound the quadratic cost. Raises
    :class:`DegenerateBandwidthError` when the median distance is zero
    (at least half of all pairs coincide), since no usable bandwidth exists.
    """
    pts = _as_points(points)
    n = pts.shape[0]
    if n < 2:
        raise ValueError("median heuristic needs at least 2 points")
    if n > max_points:
        idx = np.random.default_rng(_SUBSAMPLE_SEED).choice(n, size=max_points, replace=False)
        pts = pts[np.sort(idx)]
    med = float(np.median(pdist(pts)))
    if med <= 0.0:
        raise DegenerateBandwidthError("median pairwise distance is zero (points coincide)")
    return med


def bandwidth_grid(base: float, n_points: int = 9) -> np.ndarray:
    """Candidate bandwidths ``base * 2**j`` for j equally spaced in [-4, 4].

    The default of 9 points uses the integer exponents -4..4.
    """
    if base <= 0:
        raise ValueError(f"base bandwidth must be positive, got {base}")
    if n_points < 2:
        raise ValueError("grid needs at least 2 points")
    return base * np.exp2(np.linspace(-4.0, 4.0, n_points))
