"""NetSimile: aggregated local node features compared with the Canberra distance.

Per node the seven features are degree, clustering coefficient, mean neighbour degree,
mean neighbour clustering, edges inside the ego net, edges leaving the ego net and the
number of distinct nodes those leaving edges reach. Each feature is summarised by
mean, median, standard deviation, skewness and excess kurtosis.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import networkx as nx
import numpy as np
import numpy.typing as npt
from scipy.spatial.distance import canberra
from scipy.stats import kurtosis, skew

from gcasim.errors import ValidationError
from gcasim.network import SpatialNetwork
from gcasim.similarity import DistanceMatrix, pairwise_matrix
from gcasim.similarity.distance import corpus_manifest

logger = logging.getLogger(__name__)

METHOD = "netsimile"

FEATURE_NAMES = (
    "degree",
    "clustering",
    "neighbour_degree",
    "neighbour_clustering",
    "ego_edges",
    "ego_out_edges",
    "ego_out_neighbours",
)
AGGREGATE_NAMES = ("mean", "median", "std", "skew", "kurtosis")

FloatArray = npt.NDArray[np.float64]


def node_features(graph: nx.Graph) -> FloatArray:
    """`(n, 7)` feature matrix in node order; isolated nodes get zeros for neighbour means."""
    nodes = sorted(graph.nodes)
    clustering = nx.clustering(graph)
    rows = np.zeros((len(nodes), len(FEATURE_NAMES)), dtype=np.float64)
    for row, node in enumerate(nodes):
        neighbours = list(graph.neighbors(node))
        ego = {node, *neighbours}
        inside = 0
        leaving = 0
        reached: set[int] = set()
        for member in ego:
            for other in graph.neighbors(member):
                if other in ego:
                    inside += 1
                else:
                    leaving += 1
                    reached.add(other)
        rows[row] = (
            len(neighbours),
            clustering[node],
            np.mean([graph.degree(v) for v in neighbours]) if neighbours else 0.0,
            np.mean([clustering[v] for v in neighbours]) if neighbours else 0.0,
            inside // 2,
            leaving,
            len(reached),
        )
    return rows


def _aggregate(column: FloatArray) -> list[float]:
    if np.all(column == column[0]):
        spread = [0.0, 0.0, 0.0]
    else:
        spread = [
            float(np.std(column)),
            float(skew(column, bias=True)),
            float(kurtosis(column, fisher=True, bias=True)),
        ]
    return [float(np.mean(column)), float(np.median(column)), *spread]


@dataclass(frozen=True)
class NetSimileSignature:
    name: str
    values: FloatArray

    @classmethod
    def of(cls, net: SpatialNetwork) -> NetSimileSignature:
        if net.n_nodes == 0:
            raise ValidationError(f"network {net.name!r} has no nodes")
        features = node_features(net.to_networkx())
        values = np.array(
            [value for column in features.T for value in _aggregate(column)], dtype=np.float64
        )
        if not np.all(np.isfinite(values)):
            raise ValidationError(f"non-finite NetSimile signature for {net.name!r}")
        return cls(net.name, values)

    @staticmethod
    def labels() -> list[str]:
        return [f"{feature}_{agg}" for feature in FEATURE_NAMES for agg in AGGREGATE_NAMES]

    def distance(self, other: NetSimileSignature) -> float:
        # Coordinates that are zero in both signatures contribute nothing.
        return float(canberra(self.values, other.values))


def netsimile_distance(net_a: SpatialNetwork, net_b: SpatialNetwork) -> float:
    return NetSimileSignature.of(net_a).distance(NetSimileSignature.of(net_b))


def netsimile_matrix(
    corpus: Sequence[SpatialNetwork], threads: int | None = None
) -> DistanceMatrix:
    """Signatures are extracted once per network, then compared pairwise."""
    signatures = [NetSimileSignature.of(net) for net in corpus]
    logger.debug("netsimile_signatures_extracted", extra={"networks": len(signatures)})
    return pairwise_matrix(
        [net.name for net in corpus],
        signatures,
        NetSimileSignature.distance,
        METHOD,
        threads=threads,
        manifest=corpus_manifest(corpus),
    )
