"""Square tiling of a network around its centroid."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from gcasim.errors import ConfigurationError, DegenerateInputError
from gcasim.telemetry import get_tracer

from .geo import LatLon, project_local_m
from .model import SpatialNetwork

logger = logging.getLogger(__name__)
tracer = get_tracer("gcasim.network.tiles")

DEFAULT_WINDOW_M = 20_000.0
DEFAULT_TILE_M = 1_000.0
DEFAULT_MIN_NODES = 10


@dataclass(frozen=True)
class TileSet:
    """Retained tiles in row-major order (row 0 is the southernmost band)."""

    tiles: list[SpatialNetwork]
    tile_ids: list[str]
    origin: LatLon
    tile_size_m: float
    window_size_m: float
    dropped: int = 0
    sizes: list[int] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.tiles)


def tile_split(
    net: SpatialNetwork,
    window_m: float = DEFAULT_WINDOW_M,
    tile_m: float = DEFAULT_TILE_M,
    min_nodes: int = DEFAULT_MIN_NODES,
) -> TileSet:
    """Cut the `window_m` square centred on the node centroid into `tile_m` tiles.

    A node belongs to the tile whose half-open square [x0, x0 + tile_m) x [y0, y0 + tile_m)
    contains its projected position; nodes outside the window are ignored.
    """
    if tile_m <= 0 or window_m <= 0:
        raise ConfigurationError("window and tile sizes must be positive")
    per_side = window_m / tile_m
    if per_side < 1 or not math.isclose(per_side, round(per_side), rel_tol=0, abs_tol=1e-9):
        raise ConfigurationError(
            f"window size {window_m} m is not a whole multiple of tile size {tile_m} m"
        )
    per_side_n = int(round(per_side))
    if min_nodes < 1:
        raise ConfigurationError("min_nodes must be at least 1")

    with tracer.start_as_current_span("gcasim.network.tile_split") as span:
        span.set_attribute("network", net.name)
        origin = net.centroid()
        x, y = project_local_m(net.lat, net.lon, origin)
        half = window_m / 2.0
        col = np.floor((x + half) / tile_m).astype(np.int64)
        row = np.floor((y + half) / tile_m).astype(np.int64)
        inside = (col >= 0) & (col < per_side_n) & (row >= 0) & (row < per_side_n)
        cell = np.where(inside, row * per_side_n + col, -1)

        tiles: list[SpatialNetwork] = []
        tile_ids: list[str] = []
        sizes: list[int] = []
        dropped = 0
        for key in np.unique(cell[cell >= 0]):
            members = np.flatnonzero(cell == key)
            r, c = divmod(int(key), per_side_n)
            if members.shape[0] < min_nodes:
                dropped += 1
                continue
            tile_id = f"r{r}c{c}"
            tiles.append(net.subgraph(members, name=f"{net.name}:{tile_id}"))
            tile_ids.append(tile_id)
            sizes.append(int(members.shape[0]))

        span.set_attribute("tiles", len(tiles))
        span.set_attribute("dropped", dropped)

    if not tiles:
        raise DegenerateInputError(f"no tiles retained for network {net.name!r}")
    logger.info(
        "tiles_split",
        extra={"network": net.name, "tiles": len(tiles), "dropped": dropped},
    )
    return TileSet(
        tiles=tiles,
        tile_ids=tile_ids,
        origin=origin,
        tile_size_m=float(tile_m),
        window_size_m=float(window_m),
        dropped=dropped,
        sizes=sizes,
    )
