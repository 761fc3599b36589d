"""Nonlinear aggregation of M base classifiers by prediction-pattern agreement.

A query ``x`` is mapped to its pattern, the vector of the M base predictions.
Every pool point whose own pattern agrees with it on at least a fraction
``1 - alpha`` of the M entries casts one vote with its label; ``x`` is put in
class 1 when strictly more than half of the votes are 1. An empty voter set
scores 0.

Patterns are packed into unsigned integer codes (bit m is classifier m), so
"at least ``1 - alpha`` agreement" becomes "popcount(code_x ^ code_j) <=
floor(alpha * M)": agreement fractions live on the lattice {0, 1/M, ..., 1}.
"""
from __future__ import annotations

from fractions import Fraction
from math import floor
from typing import Sequence

import numpy as np

from .core import ConfigurationError, DimensionError, SampleSplit

MAX_ENSEMBLE = 64


def as_fraction(alpha) -> Fraction:
    """Exact value of ``alpha``; floats are snapped to the nearest ratio with
    denominator <= 10**6 so that e.g. ``1/3`` means one third."""
    if isinstance(alpha, Fraction):
        return alpha
    if isinstance(alpha, int):
        return Fraction(alpha)
    return Fraction(float(alpha)).limit_denominator(10**6)


def check_alpha(alpha) -> Fraction:
    a = as_fraction(alpha)
    if not 0 <= a < 1:
        raise ConfigurationError(f"alpha must lie in [0, 1), got {alpha}")
    return a


def allowed_mismatches(alpha, M: int) -> int:
    """Largest number of disagreeing classifiers still counted as agreement."""
    return floor(check_alpha(alpha) * M)


def encode(bits) -> np.ndarray:
    """Pack 0/1 patterns of shape ``(..., M)`` into uint64 codes."""
    bits = np.asarray(bits)
    M = bits.shape[-1]
    if M > MAX_ENSEMBLE:
        raise ConfigurationError(f"at most {MAX_ENSEMBLE} base classifiers supported, got {M}")
    weights = np.left_shift(np.uint64(1), np.arange(M, dtype=np.uint64))
    return (bits.astype(np.uint64) * weights).sum(axis=-1, dtype=np.uint64)


def pattern_of(ensemble, x) -> np.ndarray:
    """Base predictions at ``x``, in ensemble order.

    ``x`` may be a single observation (returns shape ``(M,)``) or a 2-D
    batch (returns ``(n, M)``).
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    xs = np.atleast_2d(x)
    if hasattr(ensemble, "predict_all"):
        bits = ensemble.predict_all(xs)
    else:
        bits = np.column_stack([np.atleast_1d(c.predict(xs)) for c in ensemble])
    bits = np.asarray(bits, dtype=np.int8)
    return bits[0] if single else bits


def agreement_fraction(p, q) -> float:
    p = np.asarray(p)
    q = np.asarray(q)
    if p.shape != q.shape:
        raise DimensionError(f"patterns of lengths {p.shape} and {q.shape}")
    return float(np.mean(p == q))


class AggregatedClassifier:
    """Voting rule over a frozen pool of (pattern, label) pairs.

    Build it with :func:`fit_aggregate` from an ensemble and a split, or with
    :meth:`from_patterns` when the pool patterns are already known.
    """

    def __init__(self, pool_patterns, pool_labels, alpha=0, ensemble=None):
        bits = np.atleast_2d(np.asarray(pool_patterns, dtype=np.int8))
        labels = np.asarray(pool_labels, dtype=np.int64)
        if bits.shape[0] != labels.shape[0] or bits.shape[0] < 1:
            raise ConfigurationError("pool needs >= 1 pattern and one label per pattern")
        if not np.all((bits == 0) | (bits == 1)) or not np.all((labels == 0) | (labels == 1)):
            raise ValueError("patterns and labels must be 0/1")
        self.alpha = check_alpha(alpha)
        self.ensemble = ensemble
        self.M = bits.shape[1]
        self.max_mismatch = floor(self.alpha * self.M)
        self.pool_patterns = bits
        self.pool_labels = labels
        self.pool_codes = encode(bits)
        # the rule only depends on per-code label counts
        self._codes, inv = np.unique(self.pool_codes, return_inverse=True)
        self._count = np.bincount(inv, minlength=self._codes.size)
        self._ones = np.bincount(inv, weights=labels, minlength=self._codes.size).astype(np.int64)
        for arr in (self.pool_patterns, self.pool_labels, self.pool_codes):
            arr.flags.writeable = False

    @classmethod
    def from_patterns(cls, pool_patterns, pool_labels, alpha=0, ensemble=None):
        return cls(pool_patterns, pool_labels, alpha, ensemble)

    def with_alpha(self, alpha) -> "AggregatedClassifier":
        return AggregatedClassifier(self.pool_patterns, self.pool_labels, alpha, self.ensemble)

    @property
    def l(self) -> int:  # noqa: E743
        return self.pool_labels.size

    def _query_codes(self, patterns) -> np.ndarray:
        bits = np.atleast_2d(np.asarray(patterns))
        if bits.shape[1] != self.M:
            raise DimensionError(f"pattern length {bits.shape[1]} != ensemble size {self.M}")
        return encode(bits)

    def vote_counts(self, patterns) -> tuple[np.ndarray, np.ndarray]:
        """(number of label-1 voters, number of voters) for each query pattern."""
        codes = self._query_codes(patterns)
        uq, inv = np.unique(codes, return_inverse=True)
        mism = np.bitwise_count(uq[:, None] ^ self._codes[None, :])
        voter = mism <= self.max_mismatch
        ones = voter @ self._ones
        total = voter @ self._count
        return ones[inv], total[inv]

    def voter_mask(self, pattern) -> np.ndarray:
        """Boolean mask over the pool: which points vote for this query pattern."""
        code = self._query_codes(pattern)[0]
        return np.bitwise_count(self.pool_codes ^ code) <= self.max_mismatch

    def weights(self, pattern) -> np.ndarray:
        """Per-pool-point weights; all zero when nobody votes."""
        mask = self.voter_mask(pattern)
        n = mask.sum()
        return mask / n if n else np.zeros(self.l)

    def score_patterns(self, patterns) -> np.ndarray:
        ones, total = self.vote_counts(patterns)
        return np.divide(ones, total, out=np.zeros(ones.shape), where=total > 0)

    def classify_patterns(self, patterns) -> np.ndarray:
        ones, total = self.vote_counts(patterns)
        return (2 * ones > total).astype(np.int8)

    def score(self, x):
        x = np.asarray(x, dtype=float)
        s = self.score_patterns(np.atleast_2d(pattern_of(self.ensemble, x)))
        return float(s[0]) if x.ndim == 1 else s

    def classify(self, x):
        x = np.asarray(x, dtype=float)
        c = self.classify_patterns(np.atleast_2d(pattern_of(self.ensemble, x)))
        return int(c[0]) if x.ndim == 1 else c

    predict = classify


def fit_aggregate(ensemble, split: SampleSplit, alpha=0) -> AggregatedClassifier:
    """Freeze the pool patterns of ``split.e_l`` under an ensemble fitted on ``split.d_k``."""
    check_alpha(alpha)
    bits = pattern_of(ensemble, split.e_l.x)
    return AggregatedClassifier(bits, split.e_l.y, alpha, ensemble)


def fit_aggregates(ensemble, split: SampleSplit, alphas: Sequence) -> list[AggregatedClassifier]:
    """One classifier per alpha, sharing a single pass over the pool."""
    for a in alphas:
        check_alpha(a)
    bits = pattern_of(ensemble, split.e_l.x)
    return [AggregatedClassifier(bits, split.e_l.y, a, ensemble) for a in alphas]
