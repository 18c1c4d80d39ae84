"""Average-linkage agglomerative clustering on a precomputed distance matrix."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any

import numpy as np
import numpy.typing as npt

from gcasim.errors import ConfigurationError, DegenerateInputError, ValidationError
from gcasim.similarity import DistanceMatrix

logger = logging.getLogger(__name__)

IntArray = npt.NDArray[np.int64]
FloatArray = npt.NDArray[np.float64]


def as_matrix(D: DistanceMatrix | npt.ArrayLike) -> FloatArray:  # noqa: N803
    values = D.values if isinstance(D, DistanceMatrix) else np.asarray(D, dtype=np.float64)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise ValidationError(f"distance matrix must be square, got shape {values.shape}")
    return values


@dataclass(frozen=True)
class Merge:
    """One agglomeration: cluster ids follow SciPy (items 0..n-1, merge t creates n + t)."""

    left: int
    right: int
    height: float
    size: int


@dataclass(frozen=True)
class Dendrogram:
    n: int
    merges: tuple[Merge, ...]
    method: str = "average"

    @property
    def heights(self) -> FloatArray:
        return np.array([merge.height for merge in self.merges], dtype=np.float64)

    def to_linkage(self) -> FloatArray:
        """`(n - 1, 4)` matrix usable with `scipy.cluster.hierarchy.dendrogram`."""
        return np.array(
            [[m.left, m.right, m.height, m.size] for m in self.merges], dtype=np.float64
        ).reshape(-1, 4)

    def to_dict(self) -> dict[str, Any]:
        return {"n": self.n, "method": self.method, "linkage": self.to_linkage().tolist()}


def hierarchical_cluster(D: DistanceMatrix | npt.ArrayLike) -> Dendrogram:  # noqa: N803
    """UPGMA via the Lance-Williams update; equal distances merge the lowest index pair first."""
    matrix = as_matrix(D)
    n = matrix.shape[0]
    if n < 2:
        raise DegenerateInputError("hierarchical clustering needs at least two items")

    work = matrix.astype(np.float64, copy=True)
    # Only the strict upper triangle of active slots is searched.
    blocked = np.tril(np.ones((n, n), dtype=bool))
    work[blocked] = np.inf
    active = np.ones(n, dtype=bool)
    cluster_id = np.arange(n, dtype=np.int64)
    size = np.ones(n, dtype=np.int64)
    merges: list[Merge] = []

    for step in range(n - 1):
        flat = int(np.argmin(work))
        i, j = divmod(flat, n)
        height = float(work[i, j])
        left, right = sorted((int(cluster_id[i]), int(cluster_id[j])))
        merged_size = int(size[i] + size[j])
        merges.append(Merge(left, right, height, merged_size))

        # Average linkage: the merged slot i takes size-weighted distances.
        others = np.flatnonzero(active)
        others = others[(others != i) & (others != j)]
        for k in others:
            d_ik = work[min(i, k), max(i, k)]
            d_jk = work[min(j, k), max(j, k)]
            work[min(i, k), max(i, k)] = (size[i] * d_ik + size[j] * d_jk) / merged_size
        active[j] = False
        work[j, :] = np.inf
        work[:, j] = np.inf
        cluster_id[i] = n + step
        size[i] = merged_size

    dendrogram = Dendrogram(n=n, merges=tuple(merges))
    logger.debug("dendrogram_built", extra={"items": n, "top_height": merges[-1].height})
    return dendrogram


def cut(dendrogram: Dendrogram, k: int) -> IntArray:
    """Labels after replaying the first `n - k` merges, numbered by smallest member index."""
    n = dendrogram.n
    if not 1 <= k <= n:
        raise ConfigurationError(f"k must lie in [1, {n}], got {k}")
    members: dict[int, list[int]] = {i: [i] for i in range(n)}
    for step, merge in enumerate(dendrogram.merges[: n - k]):
        members[n + step] = members.pop(merge.left) + members.pop(merge.right)
    labels = np.empty(n, dtype=np.int64)
    groups = sorted(members.values(), key=min)
    for label, group in enumerate(groups):
        labels[group] = label
    return labels
