"""Labeled datasets, metrics and the positional D_k / E_l split."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.spatial.distance import cdist

#: Equispaced 101-point grid on [0, 1] used for every curve.
STANDARD_GRID = np.linspace(0.0, 1.0, 101)


class ConfigurationError(ValueError):
    """Invalid parameters (bad k, bad bandwidth, bad alpha...)."""


class DimensionError(ValueError):
    """Observation lengths or pattern lengths do not match."""


class DomainError(ValueError):
    """A point lies outside the region where a quantity is defined."""


class ValidationError(ValueError):
    """An input table or probability vector failed a consistency check."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Dataset:
    """Immutable set of labeled observations.

    ``x`` has shape ``(n, d)`` (one row per point or discretized curve) and
    ``y`` has shape ``(n,)`` with entries in {0, 1}.
    """

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y)
        if x.ndim == 1:
            x = x[:, None]
        if x.ndim != 2:
            raise DimensionError(f"observations must be a 2-D array, got shape {x.shape}")
        if y.shape != (x.shape[0],):
            raise DimensionError(f"{x.shape[0]} observations but {y.shape} labels")
        if x.shape[1] == 0:
            raise DimensionError("observations must be non-empty")
        if not np.all(np.isfinite(x)):
            raise ValueError("observations must be finite")
        if not np.all((y == 0) | (y == 1)):
            raise ValueError("labels must be 0 or 1")
        object.__setattr__(self, "x", _frozen(x))
        object.__setattr__(self, "y", _frozen(y.astype(np.int8)))

    def __len__(self) -> int:
        return self.x.shape[0]

    @property
    def dim(self) -> int:
        return self.x.shape[1]

    def __getitem__(self, idx) -> "Dataset":
        if isinstance(idx, (int, np.integer)):
            idx = [idx]
        return Dataset(self.x[idx], self.y[idx])

    @staticmethod
    def concat(*parts: "Dataset") -> "Dataset":
        return Dataset(np.vstack([p.x for p in parts]), np.concatenate([p.y for p in parts]))


@dataclass(frozen=True)
class Metric:
    """Distance on observations: plain ``euclidean`` or ``l2-grid``.

    ``l2-grid`` is the L2([0,1]) distance of curves sampled on ``grid``,
    with the integral approximated by the trapezoidal rule.
    """

    kind: str = "euclidean"
    grid: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in ("euclidean", "l2-grid"):
            raise ConfigurationError(f"unknown metric kind {self.kind!r}")
        if self.kind == "l2-grid":
            if self.grid is None:
                raise ConfigurationError("l2-grid metric needs a grid")
            g = np.asarray(self.grid, dtype=float)
            if g.ndim != 1 or g.size < 2 or np.any(np.diff(g) <= 0):
                raise ConfigurationError("grid must be strictly increasing with >= 2 points")
            if g[0] < 0 or g[-1] > 1:
                raise ConfigurationError("grid points must lie in [0, 1]")
            object.__setattr__(self, "grid", _frozen(g))

    @classmethod
    def l2_grid(cls, grid=STANDARD_GRID) -> "Metric":
        return cls("l2-grid", grid)

    def trapezoid_weights(self) -> np.ndarray:
        g = self.grid
        w = np.zeros_like(g)
        h = np.diff(g)
        w[:-1] += h / 2
        w[1:] += h / 2
        return w

    def _check(self, d: int) -> None:
        if self.kind == "l2-grid" and d != self.grid.size:
            raise DimensionError(f"curve length {d} does not match grid length {self.grid.size}")

    def _scale(self, a: np.ndarray) -> np.ndarray:
        if self.kind == "euclidean":
            return a
        return a * np.sqrt(self.trapezoid_weights())

    def distance(self, a, b) -> float:
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if a.shape != b.shape or a.ndim != 1:
            raise DimensionError(f"cannot compare observations of shapes {a.shape} and {b.shape}")
        self._check(a.size)
        diff2 = (a - b) ** 2
        if self.kind == "euclidean":
            return float(np.sqrt(diff2.sum()))
        return float(np.sqrt(np.trapezoid(diff2, self.grid)))

    def pairwise(self, a, b) -> np.ndarray:
        """Distance matrix of shape ``(len(a), len(b))``."""
        a = np.atleast_2d(np.asarray(a, dtype=float))
        b = np.atleast_2d(np.asarray(b, dtype=float))
        if a.shape[1] != b.shape[1]:
            raise DimensionError(f"dimension {a.shape[1]} vs {b.shape[1]}")
        self._check(a.shape[1])
        return cdist(self._scale(a), self._scale(b))


@dataclass(frozen=True)
class SampleSplit:
    d_k: Dataset
    e_l: Dataset

    @property
    def k(self) -> int:
        return len(self.d_k)

    @property
    def l(self) -> int:  # noqa: E743
        return len(self.e_l)


def split(data: Dataset, k: int) -> SampleSplit:
    """First ``k`` points train the base classifiers, the rest form the voting pool."""
    n = len(data)
    if not 1 <= k <= n - 1:
        raise ConfigurationError(f"split size k={k} must satisfy 1 <= k <= n-1 = {n - 1}")
    return SampleSplit(data[:k], data[k:])
