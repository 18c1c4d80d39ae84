"""Spatial network model, geometry, features, I/O and tiling."""

from __future__ import annotations

from .features import HalfEdgeFeatures, compute_edge_features, init_states, mean_edge_length
from .geo import EARTH_RADIUS_M, haversine_m
from .io import NetworkFormat, load_network, save_edge_list, save_network
from .model import HalfEdgeFeature, SpatialNetwork, SpatialNode
from .tiles import TileSet, tile_split

__all__ = [
    "EARTH_RADIUS_M",
    "HalfEdgeFeature",
    "HalfEdgeFeatures",
    "NetworkFormat",
    "SpatialNetwork",
    "SpatialNode",
    "TileSet",
    "compute_edge_features",
    "haversine_m",
    "init_states",
    "load_network",
    "mean_edge_length",
    "save_edge_list",
    "save_network",
    "tile_split",
]
