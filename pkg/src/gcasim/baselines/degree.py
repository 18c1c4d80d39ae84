"""degreeJSD: Jensen-Shannon divergence between exact degree distributions."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np
import numpy.typing as npt

from gcasim.errors import ValidationError
from gcasim.network import SpatialNetwork
from gcasim.similarity import DistanceMatrix, jsd_numpy, pairwise_matrix
from gcasim.similarity.distance import corpus_manifest

METHOD = "degreejsd"


def degree_distributions(
    net_a: SpatialNetwork, net_b: SpatialNetwork
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64], npt.NDArray[np.int64]]:
    """Degree frequencies of both networks over the union of observed degrees."""
    for net in (net_a, net_b):
        if net.n_nodes == 0:
            raise ValidationError(f"network {net.name!r} has no nodes")
    support = np.union1d(net_a.degree, net_b.degree)
    p = np.array([np.count_nonzero(net_a.degree == d) for d in support], dtype=np.float64)
    q = np.array([np.count_nonzero(net_b.degree == d) for d in support], dtype=np.float64)
    return p / net_a.n_nodes, q / net_b.n_nodes, support


def degree_jsd(net_a: SpatialNetwork, net_b: SpatialNetwork) -> float:
    p, q, _ = degree_distributions(net_a, net_b)
    return jsd_numpy(p, q)


def degree_jsd_matrix(
    corpus: Sequence[SpatialNetwork], threads: int | None = None
) -> DistanceMatrix:
    for net in corpus:
        if net.n_nodes == 0:
            raise ValidationError(f"network {net.name!r} has no nodes")
    return pairwise_matrix(
        [net.name for net in corpus],
        corpus,
        degree_jsd,
        METHOD,
        threads=threads,
        manifest=corpus_manifest(corpus),
    )
