"""Seeded synthetic data: the translated-cube model and two sine-basis curve models.

All randomness comes from a ``numpy.random.Generator`` (PCG64 by default), so
a dataset is a pure function of (spec, count, seed).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import sindg

from .core import STANDARD_GRID, ConfigurationError, Dataset

N_HARMONICS = 40


@dataclass(frozen=True)
class HighDimSpec:
    """Class 1 ~ U[-w, w]^dim with prior 1 - mixing; class 0 ~ the same cube shifted by (v, ..., v)."""

    dim: int = 150
    mixing: float = 1 / 6
    shift: float = 0.25
    half_width: float = 2.0

    def __post_init__(self):
        if self.dim < 1:
            raise ConfigurationError("dim must be >= 1")
        if not 0 < self.mixing < 1:
            raise ConfigurationError("mixing must lie in (0, 1)")
        if self.half_width <= 0:
            raise ConfigurationError("half_width must be > 0")


def gen_highdim(spec: HighDimSpec, count: int, rng: np.random.Generator) -> Dataset:
    if count < 1:
        raise ConfigurationError("count must be >= 1")
    z = rng.random(count)
    y = (z > spec.mixing).astype(np.int8)
    x = rng.uniform(-spec.half_width, spec.half_width, size=(count, spec.dim))
    x[y == 0] += spec.shift
    return Dataset(x, y)


def basis(j, t):
    """sqrt(2) sin(pi j t), exact zeros at integer multiples of pi."""
    return np.sqrt(2.0) * sindg(180.0 * np.asarray(j) * np.asarray(t))


def basis_matrix(n_harmonics: int, grid=STANDARD_GRID) -> np.ndarray:
    j = np.arange(1, n_harmonics + 1)[:, None]
    return basis(j, np.asarray(grid)[None, :])


def theta_inverse_square(j):
    return 1.0 / np.asarray(j, dtype=float) ** 2


def theta_exp(j):
    return np.exp(-((2.1 - (np.asarray(j, dtype=float) - 1) / 20) ** 2))


@dataclass(frozen=True)
class FunctionalSpec:
    """Two populations of curves: mean in the first few sine harmonics plus
    a Gaussian error with variance ``thetas[j]`` on harmonic j+1.

    Population 1 gets label 1, population 2 label 0.
    """

    model: str
    mean1: tuple
    mean2: tuple
    thetas: np.ndarray = field(compare=False)
    grid: np.ndarray = field(default=STANDARD_GRID, compare=False)

    def __post_init__(self):
        if len(self.mean1) != len(self.mean2):
            raise ConfigurationError("mean vectors must have equal length")
        th = np.asarray(self.thetas, dtype=float)
        if np.any(th <= 0):
            raise ConfigurationError("error variances must be positive")
        object.__setattr__(self, "thetas", th)

    @property
    def n_mean(self) -> int:
        return len(self.mean1)

    @classmethod
    def model_i(cls) -> "FunctionalSpec":
        j = np.arange(1, N_HARMONICS + 1)
        return cls("I", (0, -0.5, 1, -0.5, 1, -0.5), (0, -0.75, 0.75, -0.15, 1.4, 0.1),
                   theta_inverse_square(j))

    @classmethod
    def model_ii(cls, theta_form: str = "exp") -> "FunctionalSpec":
        """``theta_form`` picks the error decay: ``exp`` (default) or ``inverse-square``."""
        j = np.arange(1, N_HARMONICS + 1)
        forms = {"exp": theta_exp, "inverse-square": theta_inverse_square}
        if theta_form not in forms:
            raise ConfigurationError(f"theta_form must be one of {sorted(forms)}")
        return cls("II", (0.75, -0.75, 0.75), (0.0, 0.0, 0.0), forms[theta_form](j))

    def mean_curve(self, population: int) -> np.ndarray:
        mu = np.asarray(self.mean1 if population == 1 else self.mean2, dtype=float)
        return mu @ basis_matrix(self.n_mean, self.grid)


def gen_functional(spec: FunctionalSpec, count_per_pop: int, rng: np.random.Generator,
                   shuffle: bool = True) -> Dataset:
    """``count_per_pop`` curves from each population, discretized on ``spec.grid``.

    With ``shuffle`` the two populations are interleaved in random order, so a
    positional split sees a random label mix.
    """
    if count_per_pop < 1:
        raise ConfigurationError("count_per_pop must be >= 1")
    phi = basis_matrix(spec.thetas.size, spec.grid)
    scale = np.sqrt(spec.thetas)
    curves, labels = [], []
    for pop, label in ((1, 1), (2, 0)):
        z = rng.standard_normal((count_per_pop, spec.thetas.size))
        curves.append(spec.mean_curve(pop) + (z * scale) @ phi)
        labels.append(np.full(count_per_pop, label, dtype=np.int8))
    x = np.vstack(curves)
    y = np.concatenate(labels)
    if shuffle:
        perm = rng.permutation(x.shape[0])
        x, y = x[perm], y[perm]
    return Dataset(x, y)
