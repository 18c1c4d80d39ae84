"""Initial node states and per-half-edge geometric features."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import TYPE_CHECKING

import numpy as np
import torch

from gcasim.telemetry import get_tracer

from .geo import FloatArray, forward_azimuth_deg, haversine_array

if TYPE_CHECKING:  # pragma: no cover
    from .model import HalfEdgeFeature, SpatialNetwork

logger = logging.getLogger(__name__)
tracer = get_tracer("gcasim.network.features")


@dataclass(frozen=True)
class HalfEdgeFeatures:
    """Feature arrays aligned with `SpatialNetwork.src`/`dst` (one entry per half-edge)."""

    length_m: FloatArray
    d: FloatArray
    theta: FloatArray

    def __len__(self) -> int:
        return int(self.d.shape[0])

    def __getitem__(self, half_edge: int) -> HalfEdgeFeature:
        from .model import HalfEdgeFeature

        return HalfEdgeFeature(d=float(self.d[half_edge]), theta=float(self.theta[half_edge]))

    @cached_property
    def torch(self) -> tuple[torch.Tensor, torch.Tensor]:
        return torch.from_numpy(self.d.copy()), torch.from_numpy(self.theta.copy())


def _segment_max(values: FloatArray, segments: np.ndarray, n: int) -> FloatArray:
    out = np.zeros(n, dtype=np.float64)
    np.maximum.at(out, segments, values)
    return out


def compute_edge_features(net: SpatialNetwork) -> HalfEdgeFeatures:
    """Normalised length `d` and adjacent-gap angle `theta` for every half-edge."""
    with tracer.start_as_current_span("gcasim.network.compute_edge_features") as span:
        span.set_attribute("network", net.name)
        span.set_attribute("half_edges", net.n_half_edges)
        src, dst = net.src, net.dst
        n = net.n_nodes
        if src.shape[0] == 0:
            empty = np.zeros(0, dtype=np.float64)
            return HalfEdgeFeatures(length_m=empty, d=empty.copy(), theta=empty.copy())

        length = haversine_array(net.lat[src], net.lon[src], net.lat[dst], net.lon[dst])
        max_len = _segment_max(length, src, n)
        with np.errstate(invalid="ignore", divide="ignore"):
            d = np.where(max_len[src] > 0, length / max_len[src], 1.0)

        zero = length <= 0.0
        if np.any(zero):
            # Smallest positive normalised value at the same origin, 1.0 when none exists.
            positive = np.where(zero, np.inf, d)
            floor = np.full(n, np.inf)
            np.minimum.at(floor, src, positive)
            floor = np.where(np.isfinite(floor), floor, 1.0)
            d = np.where(zero, floor[src], d)
            for h in np.flatnonzero(zero):
                logger.warning(
                    "zero_length_edge",
                    extra={
                        "network": net.name,
                        "u": int(net.ids[src[h]]),
                        "v": int(net.ids[dst[h]]),
                    },
                )

        azimuth = forward_azimuth_deg(net.lat[src], net.lon[src], net.lat[dst], net.lon[dst])
        order = np.lexsort((azimuth, src))
        az_sorted = azimuth[order]
        starts = net.indptr[:-1][src[order]]
        ends = net.indptr[1:][src[order]] - 1
        positions = np.arange(order.shape[0])
        is_last = positions == ends
        following = np.where(is_last, starts, positions + 1)
        gap_next = az_sorted[following] - az_sorted + np.where(is_last, 360.0, 0.0)
        is_first = positions == starts
        preceding = np.where(is_first, ends, positions - 1)
        gap_prev = gap_next[preceding]
        theta = np.empty_like(azimuth)
        theta[order] = (gap_prev + gap_next) / 360.0

        leaf = net.degree[src] == 1
        theta[leaf] = 1.0
        d[leaf] = 1.0

        return HalfEdgeFeatures(length_m=length, d=d, theta=theta)


def init_states(net: SpatialNetwork) -> torch.Tensor:
    """Initial state of every node: its degree, as float64."""
    return net.torch_degree.clone()


def mean_edge_length(net: SpatialNetwork) -> FloatArray:
    """Mean length in meters of each node's outgoing edges (0 for isolated nodes)."""
    totals = np.zeros(net.n_nodes, dtype=np.float64)
    np.add.at(totals, net.src, net.features.length_m)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(net.degree > 0, totals / np.maximum(net.degree, 1), 0.0)
