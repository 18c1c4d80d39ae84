"""Applications: internal consistency and state/variable correlations."""

from __future__ import annotations

from .consistency import ConsistencyReport, consistency_index, internal_consistency
from .correlation import (
    CorrelationRow,
    CorrelationTable,
    ExternalVariable,
    edge_length_variable,
    iterate_correlations,
    load_edge_variable,
    load_external_variable,
    spearman,
)

__all__ = [
    "ConsistencyReport",
    "CorrelationRow",
    "CorrelationTable",
    "ExternalVariable",
    "consistency_index",
    "edge_length_variable",
    "internal_consistency",
    "iterate_correlations",
    "load_edge_variable",
    "load_external_variable",
    "spearman",
]
