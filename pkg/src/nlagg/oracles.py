"""Ground truth independent of the fast code paths.

Bayes rule and risk of the translated-cube model, the limiting risk of the
aggregated rule on a table of pattern-cell probabilities, and literal
loop-based re-implementations of the voting rule.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .aggregator import as_fraction
from .core import DimensionError, DomainError, ValidationError
from .generators import HighDimSpec


@dataclass(frozen=True)
class BayesRuleHighDim:
    spec: HighDimSpec = HighDimSpec()

    def _supports(self, x) -> tuple[bool, bool]:
        s = self.spec
        x = np.asarray(x, dtype=float)
        if x.shape != (s.dim,):
            raise DimensionError(f"expected a point of dimension {s.dim}, got shape {x.shape}")
        in1 = bool(np.all(np.abs(x) <= s.half_width))
        in0 = bool(np.all(np.abs(x - s.shift) <= s.half_width))
        return in1, in0

    def eta(self, x) -> float:
        """P(Y=1 | X=x); both class densities are the same constant on their cubes."""
        in1, in0 = self._supports(x)
        if not (in1 or in0):
            raise DomainError("point lies outside both class supports")
        p1 = (1 - self.spec.mixing) * in1
        p0 = self.spec.mixing * in0
        return p1 / (p1 + p0)

    def classify(self, x) -> int:
        return int(self.eta(x) > 0.5)


def bayes_classify_highdim(rule: BayesRuleHighDim, x) -> int:
    return rule.classify(x)


def overlap_fraction(spec: HighDimSpec) -> float:
    side = 2 * spec.half_width
    return max(0.0, (side - abs(spec.shift)) / side)


def bayes_risk_highdim(spec: HighDimSpec = HighDimSpec()) -> float:
    """Minority-class mass inside the overlap of the two cubes."""
    return min(spec.mixing, 1 - spec.mixing) * overlap_fraction(spec) ** spec.dim


@dataclass(frozen=True)
class PatternCellTable:
    """``p1[c]`` = P(pattern code c, Y=1), ``p0[c]`` = P(pattern code c, Y=0).

    Codes pack pattern bits as in :func:`nlagg.aggregator.encode`.
    """

    p1: np.ndarray
    p0: np.ndarray

    def __post_init__(self):
        p1 = np.asarray(self.p1, dtype=float)
        p0 = np.asarray(self.p0, dtype=float)
        if p1.shape != p0.shape or p1.ndim != 1:
            raise ValidationError("p1 and p0 must be vectors of equal length")
        M = int(np.log2(p1.size)) if p1.size else -1
        if p1.size == 0 or 2**M != p1.size:
            raise ValidationError("table length must be 2**M")
        if np.any(p1 < 0) or np.any(p0 < 0):
            raise ValidationError("cell probabilities must be nonnegative")
        total = p1.sum() + p0.sum()
        if abs(total - 1) > 1e-9:
            raise ValidationError(f"cell probabilities sum to {total}, not 1")
        object.__setattr__(self, "p1", p1)
        object.__setattr__(self, "p0", p0)

    @property
    def M(self) -> int:
        return int(np.log2(self.p1.size))


def empirical_cell_table(patterns, labels) -> PatternCellTable:
    """Relative frequencies of (pattern, label) pairs."""
    bits = np.atleast_2d(np.asarray(patterns, dtype=np.int64))
    labels = np.asarray(labels)
    M = bits.shape[1]
    codes = (bits << np.arange(M)).sum(axis=1)
    n = labels.size
    p1 = np.bincount(codes[labels == 1], minlength=2**M) / n
    p0 = np.bincount(codes[labels == 0], minlength=2**M) / n
    return PatternCellTable(p1, p0)


def limit_risk(table: PatternCellTable) -> float:
    """Large-pool risk of the aggregated rule: sum over cells of min(p1, p0)."""
    return float(np.minimum(table.p1, table.p0).sum())


def marginal_rule_risk(table: PatternCellTable, m: int) -> float:
    """Risk of base classifier ``m`` alone, read off the same table."""
    if not 0 <= m < table.M:
        raise DimensionError(f"classifier index {m} out of range for M={table.M}")
    bit = (np.arange(table.p1.size) >> m) & 1
    return float(table.p1[bit == 0].sum() + table.p0[bit == 1].sum())


def brute_force_aggregate(query_pattern, pool_patterns, pool_labels, alpha) -> Fraction:
    """Voting score by direct enumeration, in exact arithmetic."""
    q = [int(b) for b in query_pattern]
    M = len(q)
    a = as_fraction(alpha)
    weights = []
    for p in pool_patterns:
        p = [int(b) for b in p]
        if len(p) != M:
            raise DimensionError("pattern length mismatch")
        agree = Fraction(sum(1 for i in range(M) if p[i] == q[i]), M)
        weights.append(1 if agree >= 1 - a else 0)
    total = sum(weights)
    if total == 0:
        return Fraction(0)
    return Fraction(sum(w * int(y) for w, y in zip(weights, pool_labels)), total)


def exact_match_aggregate(query_pattern, pool_patterns, pool_labels) -> Fraction:
    """Score using only pool points whose pattern equals the query's."""
    q = tuple(int(b) for b in query_pattern)
    votes = [int(y) for p, y in zip(pool_patterns, pool_labels) if tuple(int(b) for b in p) == q]
    return Fraction(sum(votes), len(votes)) if votes else Fraction(0)
