"""Agglomerative hierarchical clustering engines and Baire prefix clustering."""
from .dendrogram import (
    Dendrogram,
    Merge,
    Partition,
    canonical_equal,
    canonical_form,
    check_ultrametric,
    cophenetic,
    cut,
    detect_inversions,
    to_newick,
)
from .errors import ConfigError, DataError, HclustError, IncompatibleMethodError
from .lance_williams import Method

__all__ = [
    "ConfigError",
    "DataError",
    "Dendrogram",
    "HclustError",
    "IncompatibleMethodError",
    "Merge",
    "Method",
    "Partition",
    "canonical_equal",
    "canonical_form",
    "check_ultrametric",
    "cophenetic",
    "cut",
    "detect_inversions",
    "to_newick",
]
