"""Cluster-count selection by joint Silhouette / Davies-Bouldin rank."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import numpy.typing as npt
from scipy.stats import rankdata

from gcasim.errors import ConfigurationError, DegenerateInputError
from gcasim.telemetry import get_tracer

from .hierarchy import Dendrogram, IntArray, as_matrix, cut, hierarchical_cluster
from .indices import DEFAULT_TEMPERATURE, MatrixLike, db_index, evaluate, silhouette

logger = logging.getLogger(__name__)
tracer = get_tracer("gcasim.clustering.selection")

DEFAULT_K_MAX = 12


@dataclass(frozen=True)
class RankRow:
    k: int
    silhouette: float
    db: float
    silhouette_rank: int
    db_rank: int

    @property
    def rank_sum(self) -> int:
        return self.silhouette_rank + self.db_rank


@dataclass
class ClusterResult:
    labels: IntArray
    k: int
    silhouette: float
    soft_silhouette: float
    ch: float
    db: float
    dendrogram: Dendrogram
    ranks: list[RankRow] = field(default_factory=list)
    degenerate: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "k": self.k,
            "labels": self.labels.tolist(),
            "silhouette": self.silhouette,
            "soft_silhouette": self.soft_silhouette,
            "ch": self.ch,
            "db": self.db,
            "degenerate": self.degenerate,
            "linkage": self.dendrogram.to_linkage().tolist(),
            "ranks": [
                {
                    "k": row.k,
                    "silhouette": row.silhouette,
                    "db": row.db,
                    "silhouette_rank": row.silhouette_rank,
                    "db_rank": row.db_rank,
                    "rank_sum": row.rank_sum,
                }
                for row in self.ranks
            ],
        }


def select_k(
    D: MatrixLike,  # noqa: N803
    k_min: int = 2,
    k_max: int | None = None,
    temperature: float = DEFAULT_TEMPERATURE,
    dendrogram: Dendrogram | None = None,
) -> ClusterResult:
    """Sweep k over the average-linkage dendrogram and keep the best joint rank.

    Silhouette is ranked descending and DB ascending (ties share the lower rank); the
    smallest rank sum wins and equal sums go to the smaller k. An all-zero matrix yields
    `k_min` with `degenerate=True`.
    """
    matrix: npt.NDArray[np.float64] = as_matrix(D)
    n = matrix.shape[0]
    if n < 3:
        raise DegenerateInputError(f"cluster-count selection needs at least 3 items, got {n}")
    upper = min(DEFAULT_K_MAX, n - 1) if k_max is None else k_max
    if not 2 <= k_min <= upper <= n - 1:
        raise ConfigurationError(f"invalid k range [{k_min}, {upper}] for {n} items")

    with tracer.start_as_current_span("gcasim.clustering.select_k") as span:
        span.set_attribute("items", n)
        span.set_attribute("k_min", k_min)
        span.set_attribute("k_max", upper)
        tree = dendrogram or hierarchical_cluster(matrix)
        ks = list(range(k_min, upper + 1))
        cuts = [cut(tree, k) for k in ks]
        sil = np.array([silhouette(matrix, labels) for labels in cuts])
        db = np.array([db_index(matrix, labels) for labels in cuts])
        sil_rank = rankdata(-sil, method="min").astype(int)
        db_rank = rankdata(db, method="min").astype(int)
        ranks = [
            RankRow(k, float(s), float(d), int(rs), int(rd))
            for k, s, d, rs, rd in zip(ks, sil, db, sil_rank, db_rank, strict=True)
        ]
        best = min(range(len(ks)), key=lambda idx: (ranks[idx].rank_sum, ks[idx]))
        labels = cuts[best]
        indices = evaluate(matrix, labels, temperature)
        degenerate = bool(np.all(matrix == 0.0))
        span.set_attribute("k", ks[best])

    if degenerate:
        logger.warning("degenerate_distance_matrix", extra={"items": n, "k": ks[best]})
    logger.info(
        "cluster_count_selected",
        extra={"k": ks[best], "silhouette": indices.silhouette, "db": indices.db},
    )
    return ClusterResult(
        labels=labels,
        k=ks[best],
        silhouette=indices.silhouette,
        soft_silhouette=indices.soft_silhouette,
        ch=indices.ch,
        db=indices.db,
        dendrogram=tree,
        ranks=ranks,
        degenerate=degenerate,
    )
