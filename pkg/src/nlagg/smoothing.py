"""Nadaraya-Watson smoothing of training curves with per-population bandwidths."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Optional, Sequence

import numpy as np

from .aggregator import fit_aggregate
from .core import STANDARD_GRID, ConfigurationError, Dataset, Metric, split
from .knn import EnsembleSpec

#: Bandwidths .10, .15, ..., .70.
DEFAULT_BANDWIDTH_GRID = tuple(round(0.1 + 0.05 * i, 2) for i in range(13))


@dataclass(frozen=True)
class SmootherSpec:
    h1: float = 0.15
    h2: float = 0.7
    search_grid: Optional[tuple] = None

    def __post_init__(self):
        if self.h1 <= 0 or self.h2 <= 0:
            raise ConfigurationError("bandwidths must be > 0")
        if self.search_grid is not None:
            g = np.asarray(self.search_grid, dtype=float)
            if g.size == 0 or np.any(g <= 0) or np.any(g > 1) or np.any(np.diff(g) <= 0):
                raise ConfigurationError("search grid must be strictly increasing values in (0, 1]")


def nw_weights(h: float, grid=STANDARD_GRID) -> np.ndarray:
    """Row-stochastic smoothing matrix: ``smoothed = W @ curve``."""
    if not h > 0:
        raise ConfigurationError(f"bandwidth must be > 0, got {h}")
    grid = np.asarray(grid, dtype=float)
    u = (grid[:, None] - grid[None, :]) / h
    # unnormalized normal kernel; the constant cancels in the ratio
    k = np.exp(-0.5 * u * u)
    return k / k.sum(axis=1, keepdims=True)


def nw_smooth(curve, h: float, grid=STANDARD_GRID) -> np.ndarray:
    """Smooth one curve (1-D) or a stack of curves (rows of a 2-D array)."""
    curve = np.asarray(curve, dtype=float)
    w = nw_weights(h, grid)
    return curve @ w.T


def smooth_training_set(train: Dataset, spec: SmootherSpec, grid=STANDARD_GRID) -> Dataset:
    """Label-1 curves smoothed with ``h1``, label-0 curves with ``h2``; order kept."""
    x = np.array(train.x, copy=True)
    ones = train.y == 1
    if ones.any():
        x[ones] = nw_smooth(x[ones], spec.h1, grid)
    if (~ones).any():
        x[~ones] = nw_smooth(x[~ones], spec.h2, grid)
    return Dataset(x, train.y)


def _pipeline_error(train: Dataset, test: Dataset, h1: float, h2: float, k: int,
                    ensemble_spec: EnsembleSpec, alpha, metric: Metric,
                    rng: np.random.Generator) -> float:
    sm = smooth_training_set(train, SmootherSpec(h1, h2), metric.grid)
    sp = split(sm, k)
    ens = ensemble_spec.build(sp.d_k, metric, rng)
    agg = fit_aggregate(ens, sp, alpha)
    return float(np.mean(agg.classify(test.x) != test.y))


def cv_bandwidths(train: Dataset, grid: Sequence[float] = DEFAULT_BANDWIDTH_GRID,
                  ensemble_spec: EnsembleSpec = EnsembleSpec.odd_range(5), alpha=0,
                  rng: np.random.Generator | None = None, shuffles: int = 5,
                  k_fraction: float = 0.6, metric: Metric | None = None) -> tuple[float, float]:
    """Pick (h1, h2) minimizing the held-out error of smooth -> ensemble -> aggregate.

    Each of ``shuffles`` random 50/50 splits of ``train`` smooths and fits on
    one half and scores the raw curves of the other half. Ties go to the
    smaller h1, then the smaller h2.
    """
    grid = [float(h) for h in grid]
    if not grid:
        raise ConfigurationError("bandwidth grid is empty")
    if len(set(train.y.tolist())) < 2:
        raise ConfigurationError("bandwidth search needs both labels in the training set")
    rng = np.random.default_rng(0) if rng is None else rng
    metric = Metric.l2_grid() if metric is None else metric
    grid = sorted(grid)
    if len(grid) == 1:
        return grid[0], grid[0]

    n = len(train)
    half = n // 2
    k = max(1, min(half - 1, round(k_fraction * half)))
    folds = []
    for _ in range(shuffles):
        perm = rng.permutation(n)
        folds.append((train[perm[:half]], train[perm[half:]], rng.integers(2**63)))

    best, best_err = None, np.inf
    for h1, h2 in product(grid, grid):
        err = 0.0
        for fit_half, held_out, s in folds:
            err += _pipeline_error(fit_half, held_out, h1, h2, k, ensemble_spec, alpha,
                                   metric, np.random.default_rng(s))
        if err < best_err:
            best, best_err = (h1, h2), err
    return best
