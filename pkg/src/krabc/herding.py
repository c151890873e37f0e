"""Kernel herding: greedy point selection from an empirical kernel mean.

Point t+1 maximizes

    sum_i w_i k(theta, theta_i)  -  (1/(t+1)) * sum_{j<=t} k(theta, theta_j)

over the search box, where the first sum runs over the source embedding and
the second over the points already selected. With informative weights the
attraction term dominates and points track the embedding mass; with collapsed
weights the repulsion term dominates and points spread out to explore
(the auto-correction behaviour).

The argmax is taken over a finite candidate pool: the source particles, fresh
uniform draws from the box, and rounds of Gaussian perturbations of the
incumbent with geometrically shrinking scale. The pool always contains the
source particles, so embeddings peaked at a particle are resolved exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .kabc import WeightedParticleSet
from .kernels import kernel_matrix


@dataclass(frozen=True)
class SearchConfig:
    """Argmax search domain and effort for herding.

    box: per-dimension (lo, hi) bounds, shape (d, 2), finite, lo < hi allowed
        to collapse to a point only via lo == hi.
    pool_size: uniform draws per round and perturbation draws per refine stage.
    refine_steps: extra shrinking perturbation stages after the first
        (scale starts at 10% of the box width and halves each stage).
    integer_mask: informational; integer dimensions are herded continuously
        and rounded at simulator boundaries.
    """

    box: np.ndarray
    pool_size: int = 200
    refine_steps: int = 5
    integer_mask: np.ndarray | None = None

    def __post_init__(self):
        box = np.atleast_2d(np.asarray(self.box, dtype=float))
        if box.ndim != 2 or box.shape[1] != 2:
            raise ValueError(f"box must have shape (d, 2), got {box.shape}")
        if not np.isfinite(box).all():
            raise ValueError("search box must be finite")
        if np.any(box[:, 0] > box[:, 1]):
            raise ValueError("box lower bounds must not exceed upper bounds")
        if self.pool_size < 1:
            raise ValueError(f"pool_size must be >= 1, got {self.pool_size}")
        if self.refine_steps < 0:
            raise ValueError(f"refine_steps must be >= 0, got {self.refine_steps}")
        object.__setattr__(self, "box", box)


@dataclass
class HerdingDiagnostics:
    """Per-round candidate log (only populated when requested)."""

    candidates: list[np.ndarray] = field(default_factory=list)
    values: list[np.ndarray] = field(default_factory=list)
    chosen_index: list[int] = field(default_factory=list)


def _objective_batch(source: WeightedParticleSet, selected: np.ndarray, candidates: np.ndarray) -> np.ndarray:
    cfg = source.kernel_cfg
    vals = kernel_matrix(candidates, source.particles, cfg) @ source.weights
    t = selected.shape[0]
    if t > 0:
        vals = vals - kernel_matrix(candidates, selected, cfg).sum(axis=1) / (t + 1)
    return vals


def herding_objective(source: WeightedParticleSet, selected, theta) -> float:
    """Herding acquisition value at ``theta`` given already selected points.

    ``selected`` is a (t, d) stack (possibly empty) of previously herded points.
    """
    sel = np.asarray(selected, dtype=float).reshape(-1, source.dim)
    cand = np.asarray(theta, dtype=float).reshape(1, source.dim)
    return float(_objective_batch(source, sel, cand)[0])


def herd(
    source: WeightedParticleSet,
    count: int,
    search: SearchConfig,
    seed: int,
    diagnostics: HerdingDiagnostics | None = None,
) -> np.ndarray:
    """Greedily herd ``count`` points from an embedding.

    Deterministic given (source, count, search, seed). Every returned point
    maximizes the round's objective over the evaluated candidate pool; ties
    break toward the lowest candidate index. All points lie inside the box.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    box = search.box
    if box.shape[0] != source.dim:
        raise ValueError(f"box dimension {box.shape[0]} != particle dimension {source.dim}")
    lo, hi = box[:, 0], box[:, 1]
    width = hi - lo
    rng = np.random.default_rng(seed)

    src_clipped = np.clip(source.particles, lo, hi)
    selected = np.empty((count, source.dim))
    for t in range(count):
        sel = selected[:t]
        cands = [src_clipped, rng.uniform(lo, hi, size=(search.pool_size, source.dim))]
        pool = np.vstack(cands)
        vals = _objective_batch(source, sel, pool)
        best = int(np.argmax(vals))
        best_val = vals[best]
        best_pt = pool[best]

        scale = 0.1 * width
        for _ in range(search.refine_steps + 1):
            pert = best_pt + rng.standard_normal((search.pool_size, source.dim)) * scale
            np.clip(pert, lo, hi, out=pert)
            pvals = _objective_batch(source, sel, pert)
            j = int(np.argmax(pvals))
            if pvals[j] > best_val:
                best_val = pvals[j]
                best_pt = pert[j]
                best = pool.shape[0] + j
            if diagnostics is not None:
                pool = np.vstack([pool, pert])
                vals = np.concatenate([vals, pvals])
            scale = scale * 0.5

        selected[t] = best_pt
        if diagnostics is not None:
            diagnostics.candidates.append(pool)
            diagnostics.values.append(vals)
            diagnostics.chosen_index.append(best)
    return selected
