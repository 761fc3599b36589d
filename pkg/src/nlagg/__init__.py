"""Nonlinear aggregation of classifiers by agreement of their prediction patterns."""
from .aggregator import AggregatedClassifier, agreement_fraction, fit_aggregate, pattern_of
from .core import (ConfigurationError, Dataset, DimensionError, DomainError, Metric,
                   SampleSplit, ValidationError, split)
from .knn import EnsembleSpec, KnnClassifier, KnnEnsemble, cv_select_knn, fit_knn

__all__ = [
    "AggregatedClassifier", "agreement_fraction", "fit_aggregate", "pattern_of",
    "ConfigurationError", "Dataset", "DimensionError", "DomainError", "Metric",
    "SampleSplit", "ValidationError", "split",
    "EnsembleSpec", "KnnClassifier", "KnnEnsemble", "cv_select_knn", "fit_knn",
]
