"""Internal consistency of a network: mean similarity between its own tiles."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any

import numpy as np
import numpy.typing as npt

from gcasim.engine import RuleSpec
from gcasim.errors import DegenerateInputError, ValidationError
from gcasim.network import SpatialNetwork, tile_split
from gcasim.network.tiles import DEFAULT_MIN_NODES, DEFAULT_TILE_M, DEFAULT_WINDOW_M
from gcasim.similarity import DEFAULT_BINS, LN2, DistanceMatrix, distance_matrix
from gcasim.similarity.distance import DEFAULT_ITERATIONS
from gcasim.telemetry import get_tracer

logger = logging.getLogger(__name__)
tracer = get_tracer("gcasim.analysis.consistency")


def consistency_index(D: DistanceMatrix | npt.ArrayLike) -> float:  # noqa: N803
    """`2 / (K (K - 1)) * sum_{i<j} (1 - D_ij / ln 2)` over the tile distance matrix."""
    values = D.values if isinstance(D, DistanceMatrix) else np.asarray(D, dtype=np.float64)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise ValidationError(f"distance matrix must be square, got shape {values.shape}")
    k = values.shape[0]
    if k < 2:
        raise DegenerateInputError(f"consistency needs at least two tiles, got {k}")
    rows, cols = np.triu_indices(k, k=1)
    return float(np.mean(1.0 - values[rows, cols] / LN2))


@dataclass(frozen=True)
class ConsistencyReport:
    network: str
    tile_ids: list[str]
    dropped: int
    matrix: DistanceMatrix
    ic: float

    @property
    def K(self) -> int:  # noqa: N802
        return len(self.tile_ids)

    def summary(self) -> dict[str, float]:
        upper = self.matrix.condensed()
        return {
            "min": float(upper.min()),
            "mean": float(upper.mean()),
            "max": float(upper.max()),
        }

    def to_dict(self) -> dict[str, Any]:
        return {
            "network": self.network,
            "K": self.K,
            "tile_ids": list(self.tile_ids),
            "dropped": self.dropped,
            "distance": self.summary(),
            "ic": self.ic,
        }


def internal_consistency(
    net: SpatialNetwork,
    rule: RuleSpec,
    window_m: float = DEFAULT_WINDOW_M,
    tile_m: float = DEFAULT_TILE_M,
    min_nodes: int = DEFAULT_MIN_NODES,
    T: int = DEFAULT_ITERATIONS,  # noqa: N803
    bins: int = DEFAULT_BINS,
    threads: int | None = None,
) -> ConsistencyReport:
    """Tile the network, compare every pair of retained tiles and average their similarity."""
    with tracer.start_as_current_span("gcasim.analysis.internal_consistency") as span:
        span.set_attribute("network", net.name)
        tiles = tile_split(net, window_m, tile_m, min_nodes)
        if len(tiles) < 2:
            raise DegenerateInputError(
                f"network {net.name!r} has {len(tiles)} retained tile(s); need at least two"
            )
        matrix = distance_matrix(tiles.tiles, rule, T, bins, threads=threads)
        matrix = DistanceMatrix(
            names=list(tiles.tile_ids),
            values=matrix.values,
            method=matrix.method,
            rule=matrix.rule,
            parameters={**matrix.parameters, "window_m": window_m, "tile_m": tile_m},
            manifest=matrix.manifest,
        )
        ic = consistency_index(matrix)
        span.set_attribute("tiles", len(tiles))
        span.set_attribute("ic", ic)

    logger.info(
        "internal_consistency_computed",
        extra={"network": net.name, "tiles": len(tiles), "dropped": tiles.dropped, "ic": ic},
    )
    return ConsistencyReport(
        network=net.name,
        tile_ids=list(tiles.tile_ids),
        dropped=tiles.dropped,
        matrix=matrix,
        ic=ic,
    )
