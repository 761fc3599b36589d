"""Exact k-nearest-neighbor base classifiers.

Neighbors are found by a full scan. Distance ties are broken by the lower
training index (stable sort), so every prediction is reproducible.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, Sequence

import numpy as np

from .core import ConfigurationError, Dataset, DimensionError, Metric

_CHUNK = 4096


class BaseClassifier(Protocol):
    """Anything with ``predict`` mapping observations to {0, 1} labels."""

    def predict(self, x): ...


def _check_odd(k: int, limit: int, what: str = "training size") -> None:
    if int(k) != k or k < 1 or k % 2 == 0:
        raise ConfigurationError(f"neighbor count must be a positive odd integer, got {k}")
    if k > limit:
        raise ConfigurationError(f"neighbor count {k} exceeds {what} {limit}")


def sorted_neighbor_labels(train: Dataset, metric: Metric, queries: np.ndarray,
                           kmax: int, exclude_self: bool = False) -> np.ndarray:
    """Labels of the ``kmax`` nearest training points for every query row.

    With ``exclude_self`` the queries must be the training points themselves
    and each point is dropped from its own neighbor list (leave-one-out).
    """
    queries = np.atleast_2d(np.asarray(queries, dtype=float))
    if queries.shape[1] != train.dim:
        raise DimensionError(f"query dimension {queries.shape[1]} != training dimension {train.dim}")
    out = np.empty((queries.shape[0], kmax), dtype=np.int8)
    for start in range(0, queries.shape[0], _CHUNK):
        stop = min(start + _CHUNK, queries.shape[0])
        d = metric.pairwise(queries[start:stop], train.x)
        if exclude_self:
            rows = np.arange(stop - start)
            d[rows, rows + start] = np.inf
        order = np.argsort(d, axis=1, kind="stable")[:, :kmax]
        out[start:stop] = train.y[order]
    return out


def _votes_to_labels(neighbor_labels: np.ndarray, ks: Sequence[int]) -> np.ndarray:
    ones = np.cumsum(neighbor_labels, axis=1, dtype=np.int64)
    ks = np.asarray(ks)
    return (2 * ones[:, ks - 1] > ks).astype(np.int8)


class KnnClassifier:
    """Majority vote of the ``neighbors`` closest training points."""

    def __init__(self, train: Dataset, metric: Metric, neighbors: int):
        _check_odd(neighbors, len(train))
        self.train = train
        self.metric = metric
        self.neighbors = int(neighbors)

    def __repr__(self):
        return f"KnnClassifier(neighbors={self.neighbors}, n={len(self.train)})"

    def predict(self, x):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        labels = sorted_neighbor_labels(self.train, self.metric, np.atleast_2d(x), self.neighbors)
        pred = _votes_to_labels(labels, [self.neighbors])[:, 0]
        return int(pred[0]) if single else pred


class KnnEnsemble:
    """Several kNN rules sharing one training set.

    Behaves as a sequence of :class:`KnnClassifier` but ``predict_all``
    sorts the neighbors only once for all members.
    """

    def __init__(self, train: Dataset, metric: Metric, neighbors: Sequence[int]):
        if len(neighbors) == 0:
            raise ConfigurationError("ensemble needs at least one neighbor count")
        self.classifiers = [KnnClassifier(train, metric, k) for k in neighbors]
        self.train = train
        self.metric = metric
        self.neighbors = [c.neighbors for c in self.classifiers]

    def __len__(self):
        return len(self.classifiers)

    def __iter__(self):
        return iter(self.classifiers)

    def __getitem__(self, i):
        return self.classifiers[i]

    def predict_all(self, x) -> np.ndarray:
        """Predictions of shape ``(n_queries, M)``, column m from member m."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        labels = sorted_neighbor_labels(self.train, self.metric, x, max(self.neighbors))
        return _votes_to_labels(labels, self.neighbors)


def fit_knn(train: Dataset, metric: Metric, k_nn: int) -> KnnClassifier:
    return KnnClassifier(train, metric, k_nn)


def predict_knn(clf: KnnClassifier, x):
    return clf.predict(x)


def random_odd_bound(train: Dataset) -> int:
    """Largest odd integer not above min(#ones, #zeros) of ``train``."""
    ones = int(train.y.sum())
    b = min(ones, len(train) - ones)
    return b if b % 2 == 1 else b - 1


def draw_random_odd_ensemble(train: Dataset, M: int, rng: np.random.Generator) -> list[int]:
    """Draw ``M`` distinct odd neighbor counts uniformly from {1, 3, ..., bound}.

    The bound is the smaller class count in ``train``, so every drawn rule
    can still be outvoted by the minority class.
    """
    if M < 1:
        raise ConfigurationError(f"ensemble size must be >= 1, got {M}")
    bound = random_odd_bound(train)
    available = (bound + 1) // 2 if bound >= 1 else 0
    if available < M:
        raise ConfigurationError(
            f"only {available} odd neighbor counts <= min(#ones, #zeros) bound {bound}; need {M}")
    picks = rng.choice(available, size=M, replace=False)
    return sorted(int(2 * p + 1) for p in picks)


def loo_errors(train: Dataset, metric: Metric, candidate_ks: Sequence[int]) -> np.ndarray:
    """Leave-one-out misclassification count of each candidate kNN rule."""
    for k in candidate_ks:
        _check_odd(k, len(train) - 1, "leave-one-out pool size")
    labels = sorted_neighbor_labels(train, metric, train.x, max(candidate_ks), exclude_self=True)
    preds = _votes_to_labels(labels, candidate_ks)
    return (preds != train.y[:, None]).sum(axis=0)


def cv_select_knn(train: Dataset, metric: Metric, candidate_ks: Sequence[int]) -> KnnClassifier:
    """kNN rule with the smallest leave-one-out error; ties go to the smaller k."""
    if len(candidate_ks) == 0:
        raise ConfigurationError("empty candidate list for cross-validation")
    ks = sorted(int(k) for k in candidate_ks)
    errs = loo_errors(train, metric, ks)
    return KnnClassifier(train, metric, ks[int(np.argmin(errs))])


@dataclass(frozen=True)
class EnsembleSpec:
    """How the M neighbor counts are chosen.

    ``fixed-list`` uses ``neighbors`` as given, ``random-odd`` draws ``M``
    distinct odd counts per training set, ``cv-single`` is one leave-one-out
    tuned rule over ``neighbors`` (used as the candidate grid).
    """

    mode: str = "fixed-list"
    neighbors: tuple = (5, 7, 9, 11, 13, 15, 17, 19)
    M: int = 10

    def __post_init__(self):
        if self.mode not in ("fixed-list", "random-odd", "cv-single"):
            raise ConfigurationError(f"unknown ensemble mode {self.mode!r}")
        if self.mode == "fixed-list":
            ks = list(self.neighbors)
            if not ks or any(k < 1 or k % 2 == 0 for k in ks):
                raise ConfigurationError("fixed-list neighbor counts must be positive and odd")
            if any(b <= a for a, b in zip(ks, ks[1:])):
                raise ConfigurationError("fixed-list neighbor counts must be strictly increasing")
        if self.mode == "random-odd" and self.M < 1:
            raise ConfigurationError("random-odd needs M >= 1")

    @classmethod
    def odd_range(cls, m: int) -> "EnsembleSpec":
        """The (2i-1)-NN rules, i = 1..m."""
        return cls("fixed-list", tuple(range(1, 2 * m, 2)))

    def build(self, train: Dataset, metric: Metric, rng: np.random.Generator | None = None) -> KnnEnsemble:
        if self.mode == "fixed-list":
            ks = list(self.neighbors)
        elif self.mode == "random-odd":
            if rng is None:
                raise ConfigurationError("random-odd ensembles need a random generator")
            ks = draw_random_odd_ensemble(train, self.M, rng)
        else:
            ks = [k for k in self.neighbors if k <= len(train) - 1] or [1]
            ks = [cv_select_knn(train, metric, ks).neighbors]
        return KnnEnsemble(train, metric, ks)
