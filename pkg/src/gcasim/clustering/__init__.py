"""Hierarchical clustering, validity indices and cluster-count selection."""

from __future__ import annotations

from .hierarchy import Dendrogram, Merge, cut, hierarchical_cluster
from .indices import (
    DEFAULT_TEMPERATURE,
    ClusterIndices,
    ch_index,
    db_index,
    evaluate,
    medoids,
    silhouette,
    soft_assignments,
    soft_silhouette,
    soft_silhouette_tensor,
)
from .selection import ClusterResult, RankRow, select_k

__all__ = [
    "DEFAULT_TEMPERATURE",
    "ClusterIndices",
    "ClusterResult",
    "Dendrogram",
    "Merge",
    "RankRow",
    "ch_index",
    "cut",
    "db_index",
    "evaluate",
    "hierarchical_cluster",
    "medoids",
    "select_k",
    "silhouette",
    "soft_assignments",
    "soft_silhouette",
    "soft_silhouette_tensor",
]
