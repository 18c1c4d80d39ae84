"""Internal cluster validity indices computed from distances only.

CH and DB use medoids in place of centroids. Degenerate cases return `math.inf`.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Any

import numpy as np
import numpy.typing as npt
import torch
from sklearn.metrics import silhouette_samples

from gcasim.errors import ConfigurationError, DegenerateInputError
from gcasim.similarity import LN2, DistanceMatrix

from .hierarchy import FloatArray, IntArray, as_matrix

DEFAULT_TEMPERATURE = 0.1 * LN2

MatrixLike = DistanceMatrix | npt.ArrayLike


def canonical_labels(labels: npt.ArrayLike, n: int) -> tuple[IntArray, int]:
    """Map arbitrary cluster ids to 0..k-1 (sorted by id) and return `(labels, k)`."""
    raw = np.asarray(labels).reshape(-1)
    if raw.shape[0] != n:
        raise ConfigurationError(f"expected {n} labels, got {raw.shape[0]}")
    _, inverse = np.unique(raw, return_inverse=True)
    inverse = inverse.astype(np.int64).reshape(-1)
    return inverse, int(inverse.max()) + 1 if n else 0


def _require_clusters(k: int) -> None:
    if k < 2:
        raise DegenerateInputError(f"validity indices need at least two clusters, got {k}")


def medoids(D: MatrixLike, labels: npt.ArrayLike) -> IntArray:  # noqa: N803
    """Per cluster, the member with the least total distance to the others (lowest index wins)."""
    matrix = as_matrix(D)
    codes, k = canonical_labels(labels, matrix.shape[0])
    result = np.empty(k, dtype=np.int64)
    for c in range(k):
        members = np.flatnonzero(codes == c)
        totals = matrix[np.ix_(members, members)].sum(axis=1)
        result[c] = members[int(np.argmin(totals))]
    return result


def global_medoid(D: MatrixLike) -> int:  # noqa: N803
    return int(np.argmin(as_matrix(D).sum(axis=1)))


def silhouette(D: MatrixLike, labels: npt.ArrayLike) -> float:  # noqa: N803
    """Mean precomputed-distance silhouette; singletons score 0."""
    matrix = as_matrix(D)
    n = matrix.shape[0]
    codes, k = canonical_labels(labels, n)
    _require_clusters(k)
    if k == n:
        return 0.0
    return float(np.mean(silhouette_samples(matrix, codes, metric="precomputed")))


def soft_assignments(
    D: MatrixLike | torch.Tensor,  # noqa: N803
    labels: npt.ArrayLike,
    temperature: float = DEFAULT_TEMPERATURE,
) -> torch.Tensor:
    """`(n, k)` softmax over clusters of `-d(i, medoid_c) / temperature`."""
    if temperature <= 0:
        raise ConfigurationError(f"temperature must be positive, got {temperature}")
    distances = _as_tensor(D)
    centre = torch.from_numpy(medoids(distances.detach().cpu().numpy(), labels))
    return torch.softmax(-distances[:, centre] / temperature, dim=1)


def _as_tensor(D: MatrixLike | torch.Tensor) -> torch.Tensor:  # noqa: N803
    if isinstance(D, torch.Tensor):
        return D.to(torch.float64)
    return torch.from_numpy(as_matrix(D).copy())


def soft_silhouette_tensor(
    D: torch.Tensor,  # noqa: N803
    labels: npt.ArrayLike,
    temperature: float = DEFAULT_TEMPERATURE,
) -> torch.Tensor:
    """Probabilistic silhouette with medoid-based soft memberships, differentiable in `D`.

    For item i and cluster c, `a_ic` is the membership-weighted mean distance from i to the
    other items of c, `b_ic` the smallest such mean over the remaining clusters, and the
    score is `sum_c p_ic (b_ic - a_ic) / max(a_ic, b_ic)` averaged over items.
    """
    distances = _as_tensor(D)
    n = distances.shape[0]
    _, k = canonical_labels(labels, n)
    _require_clusters(k)
    p = soft_assignments(distances, labels, temperature)
    weighted = distances @ p
    mass = p.sum(dim=0, keepdim=True) - p
    a = weighted / mass.clamp_min(1e-12)
    others = a.unsqueeze(1).expand(n, k, k).clone()
    eye = torch.eye(k, dtype=torch.bool).unsqueeze(0).expand(n, k, k)
    others = others.masked_fill(eye, math.inf)
    b = others.min(dim=2).values
    top = torch.maximum(a, b)
    ratio = torch.where(top > 0, (b - a) / torch.where(top > 0, top, torch.ones_like(top)), 0.0)
    return (p * ratio).sum(dim=1).mean()


def soft_silhouette(
    D: MatrixLike,  # noqa: N803
    labels: npt.ArrayLike,
    temperature: float = DEFAULT_TEMPERATURE,
) -> float:
    return float(soft_silhouette_tensor(_as_tensor(D), labels, temperature))


def ch_index(D: MatrixLike, labels: npt.ArrayLike) -> float:  # noqa: N803
    """Medoid Calinski-Harabasz: `(B / (k - 1)) / (W / (n - k))`."""
    matrix = as_matrix(D)
    n = matrix.shape[0]
    codes, k = canonical_labels(labels, n)
    _require_clusters(k)
    if n <= k:
        raise DegenerateInputError("Calinski-Harabasz needs more items than clusters")
    centre = medoids(matrix, codes)
    within = float(np.sum(matrix[np.arange(n), centre[codes]] ** 2))
    if within == 0.0:
        return math.inf
    counts = np.bincount(codes, minlength=k)
    between = float(np.sum(counts * matrix[centre, global_medoid(matrix)] ** 2))
    return (between / (k - 1)) / (within / (n - k))


def db_index(D: MatrixLike, labels: npt.ArrayLike) -> float:  # noqa: N803
    """Medoid Davies-Bouldin: mean over clusters of the worst `(S_c + S_c') / d(m_c, m_c')`."""
    matrix = as_matrix(D)
    n = matrix.shape[0]
    codes, k = canonical_labels(labels, n)
    _require_clusters(k)
    centre = medoids(matrix, codes)
    scatter = np.array(
        [matrix[np.flatnonzero(codes == c), centre[c]].mean() for c in range(k)],
        dtype=np.float64,
    )
    separation = matrix[np.ix_(centre, centre)]
    worst = np.zeros(k, dtype=np.float64)
    for c in range(k):
        for other in range(k):
            if other == c:
                continue
            if separation[c, other] == 0.0:
                return math.inf
            worst[c] = max(worst[c], (scatter[c] + scatter[other]) / separation[c, other])
    return float(worst.mean())


@dataclass(frozen=True)
class ClusterIndices:
    silhouette: float
    soft_silhouette: float
    ch: float
    db: float

    def as_dict(self) -> dict[str, Any]:
        return asdict(self)


def evaluate(
    D: MatrixLike,  # noqa: N803
    labels: npt.ArrayLike,
    temperature: float = DEFAULT_TEMPERATURE,
) -> ClusterIndices:
    """All four indices for a fixed labelling; CH is `nan` when every item is its own cluster."""
    matrix: FloatArray = as_matrix(D)
    n = matrix.shape[0]
    _, k = canonical_labels(labels, n)
    return ClusterIndices(
        silhouette=silhouette(matrix, labels),
        soft_silhouette=soft_silhouette(matrix, labels, temperature),
        ch=ch_index(matrix, labels) if n > k else math.nan,
        db=db_index(matrix, labels),
    )
