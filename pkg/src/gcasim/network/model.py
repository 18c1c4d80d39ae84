"""Undirected spatial network model with CSR adjacency and half-edge indexing."""

from __future__ import annotations

import logging
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from functools import cached_property
from typing import TYPE_CHECKING, TypeAlias

import numpy as np
import numpy.typing as npt
import torch

from gcasim.errors import ValidationError
from gcasim.telemetry import get_meter

if TYPE_CHECKING:  # pragma: no cover
    import networkx as nx

    from .features import HalfEdgeFeatures

logger = logging.getLogger(__name__)
meter = get_meter("gcasim.network.model")

CLEANING_COUNTER = meter.create_counter(
    "gcasim_network_cleaning_events",
    unit="1",
    description="Edges or nodes removed while cleaning input networks",
)

IntArray: TypeAlias = npt.NDArray[np.int64]
FloatArray: TypeAlias = npt.NDArray[np.float64]


@dataclass(frozen=True)
class SpatialNode:
    """A network node with WGS84 coordinates in degrees."""

    id: int
    lat: float
    lon: float

    def __post_init__(self) -> None:
        if not -90.0 <= self.lat <= 90.0:
            raise ValidationError(f"node {self.id}: latitude {self.lat} outside [-90, 90]")
        if not -180.0 <= self.lon <= 180.0:
            raise ValidationError(f"node {self.id}: longitude {self.lon} outside [-180, 180]")


@dataclass(frozen=True)
class HalfEdgeFeature:
    """Normalised distance and angle of one directed half-edge, stored at its origin."""

    d: float
    theta: float


def _frozen(array: npt.NDArray[np.generic]) -> npt.NDArray[np.generic]:
    array.setflags(write=False)
    return array


class SpatialNetwork:
    """Immutable undirected geographic graph.

    Nodes are ordered by id. `indptr`/`indices` form a CSR adjacency whose rows hold
    neighbour positions sorted by neighbour id. Half-edge `h` runs from `src[h]` to
    `dst[h]`; every undirected edge appears as two half-edges.
    """

    def __init__(
        self,
        ids: Sequence[int] | IntArray,
        lat: Sequence[float] | FloatArray,
        lon: Sequence[float] | FloatArray,
        edges: Iterable[tuple[int, int]] | IntArray,
        name: str = "network",
    ) -> None:
        """Build from node arrays sorted by id and unique position pairs (i < j)."""
        self.name = name
        self.ids: IntArray = _frozen(np.asarray(ids, dtype=np.int64))
        self.lat: FloatArray = _frozen(np.asarray(lat, dtype=np.float64))
        self.lon: FloatArray = _frozen(np.asarray(lon, dtype=np.float64))
        n = self.ids.shape[0]
        if self.lat.shape != (n,) or self.lon.shape != (n,):
            raise ValidationError("node id and coordinate arrays differ in length")
        if n > 1 and np.any(np.diff(self.ids) <= 0):
            raise ValidationError("node ids must be unique and sorted ascending")

        pairs = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges)
        pairs = pairs.reshape(-1, 2).astype(np.int64)
        if pairs.size and (pairs.min() < 0 or pairs.max() >= n):
            raise ValidationError("edge endpoint position out of range")
        if np.any(pairs[:, 0] == pairs[:, 1]):
            raise ValidationError("self-loops must be removed before construction")
        heads = np.concatenate([pairs[:, 0], pairs[:, 1]])
        tails = np.concatenate([pairs[:, 1], pairs[:, 0]])
        order = np.lexsort((tails, heads))
        heads, tails = heads[order], tails[order]
        counts = np.bincount(heads, minlength=n).astype(np.int64)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])

        self.indptr: IntArray = _frozen(indptr)
        self.indices: IntArray = _frozen(tails)
        self.src: IntArray = _frozen(heads)
        self.dst: IntArray = self.indices
        self.degree: IntArray = _frozen(counts)

    # ------------------------------------------------------------------ constructors

    @classmethod
    def from_records(
        cls,
        nodes: Iterable[SpatialNode],
        edges: Iterable[tuple[int, int]],
        name: str = "network",
    ) -> SpatialNetwork:
        """Clean raw records: drop self-loops, merge parallel edges and coincident endpoints."""
        node_list = sorted(nodes, key=lambda node: node.id)
        by_id: dict[int, SpatialNode] = {}
        for node in node_list:
            if node.id in by_id:
                raise ValidationError(f"duplicate node id {node.id}")
            by_id[node.id] = node

        raw_edges: list[tuple[int, int]] = []
        for u, v in edges:
            for endpoint in (u, v):
                if endpoint not in by_id:
                    raise ValidationError(f"edge ({u}, {v}) references unknown node {endpoint}")
            if u == v:
                logger.warning("self_loop_dropped", extra={"node_id": u, "network": name})
                CLEANING_COUNTER.add(1, attributes={"kind": "self_loop"})
                continue
            raw_edges.append((u, v))

        # Contract edges whose endpoints share exact coordinates into the smaller id.
        parent = {node_id: node_id for node_id in by_id}

        def find(node_id: int) -> int:
            while parent[node_id] != node_id:
                parent[node_id] = parent[parent[node_id]]
                node_id = parent[node_id]
            return node_id

        for u, v in raw_edges:
            a, b = by_id[u], by_id[v]
            if a.lat == b.lat and a.lon == b.lon:
                ru, rv = find(u), find(v)
                if ru != rv:
                    keep, drop = min(ru, rv), max(ru, rv)
                    parent[drop] = keep
                    logger.warning(
                        "coincident_nodes_merged",
                        extra={"kept_id": keep, "merged_id": drop, "network": name},
                    )
                    CLEANING_COUNTER.add(1, attributes={"kind": "coincident"})

        kept = [node for node in node_list if find(node.id) == node.id]
        position = {node.id: idx for idx, node in enumerate(kept)}
        unique: set[tuple[int, int]] = set()
        for u, v in raw_edges:
            pu, pv = position[find(u)], position[find(v)]
            if pu == pv:
                continue
            unique.add((min(pu, pv), max(pu, pv)))
        merged = sum(1 for u, v in raw_edges if find(u) != find(v)) - len(unique)
        if merged:
            logger.info("parallel_edges_merged", extra={"count": merged, "network": name})
            CLEANING_COUNTER.add(merged, attributes={"kind": "parallel"})

        return cls(
            ids=[node.id for node in kept],
            lat=[node.lat for node in kept],
            lon=[node.lon for node in kept],
            edges=sorted(unique),
            name=name,
        )

    # ------------------------------------------------------------------ views

    @property
    def n_nodes(self) -> int:
        return int(self.ids.shape[0])

    @property
    def n_edges(self) -> int:
        return int(self.src.shape[0] // 2)

    @property
    def n_half_edges(self) -> int:
        return int(self.src.shape[0])

    @cached_property
    def index_of(self) -> Mapping[int, int]:
        return {int(node_id): idx for idx, node_id in enumerate(self.ids)}

    @property
    def nodes(self) -> list[SpatialNode]:
        return [
            SpatialNode(int(i), float(la), float(lo))
            for i, la, lo in zip(self.ids, self.lat, self.lon, strict=True)
        ]

    @property
    def adjacency(self) -> list[list[int]]:
        """Neighbour ids per node, sorted ascending."""
        return [
            [int(self.ids[j]) for j in self.indices[self.indptr[i] : self.indptr[i + 1]]]
            for i in range(self.n_nodes)
        ]

    def edge_pairs(self) -> IntArray:
        """Undirected edges as position pairs (i < j), sorted."""
        mask = self.src < self.dst
        return np.stack([self.src[mask], self.dst[mask]], axis=1)

    def edge_ids(self) -> list[tuple[int, int]]:
        return [(int(self.ids[i]), int(self.ids[j])) for i, j in self.edge_pairs()]

    def centroid(self) -> tuple[float, float]:
        if self.n_nodes == 0:
            raise ValidationError(f"network {self.name!r} has no nodes")
        return float(self.lat.mean()), float(self.lon.mean())

    @cached_property
    def features(self) -> HalfEdgeFeatures:
        from .features import compute_edge_features

        return compute_edge_features(self)

    @cached_property
    def torch_index(self) -> tuple[torch.Tensor, torch.Tensor]:
        return torch.from_numpy(self.src.copy()), torch.from_numpy(self.dst.copy())

    @cached_property
    def torch_degree(self) -> torch.Tensor:
        return torch.from_numpy(self.degree.astype(np.float64))

    # ------------------------------------------------------------------ derived networks

    def subgraph(
        self, positions: Sequence[int] | IntArray, name: str | None = None
    ) -> SpatialNetwork:
        """Induced subgraph on the given node positions."""
        keep = np.unique(np.asarray(positions, dtype=np.int64))
        remap = np.full(self.n_nodes, -1, dtype=np.int64)
        remap[keep] = np.arange(keep.shape[0])
        pairs = self.edge_pairs()
        inside = (remap[pairs[:, 0]] >= 0) & (remap[pairs[:, 1]] >= 0)
        new_pairs = remap[pairs[inside]]
        return SpatialNetwork(
            ids=self.ids[keep],
            lat=self.lat[keep],
            lon=self.lon[keep],
            edges=new_pairs,
            name=name or f"{self.name}-sub",
        )

    def relabel(self, mapping: Mapping[int, int], name: str | None = None) -> SpatialNetwork:
        """Same geometry under new node ids; `mapping` must be a bijection on ids."""
        new_ids = np.array([mapping[int(i)] for i in self.ids], dtype=np.int64)
        if np.unique(new_ids).shape[0] != new_ids.shape[0]:
            raise ValidationError("relabel mapping is not injective")
        order = np.argsort(new_ids, kind="stable")
        inverse = np.empty_like(order)
        inverse[order] = np.arange(order.shape[0])
        pairs = inverse[self.edge_pairs()]
        pairs = np.sort(pairs, axis=1)
        return SpatialNetwork(
            ids=new_ids[order],
            lat=self.lat[order],
            lon=self.lon[order],
            edges=pairs,
            name=name or self.name,
        )

    def to_networkx(self) -> nx.Graph:
        import networkx as nx

        graph = nx.Graph()
        graph.add_nodes_from(range(self.n_nodes))
        graph.add_edges_from((int(i), int(j)) for i, j in self.edge_pairs())
        return graph

    def __repr__(self) -> str:
        return f"SpatialNetwork(name={self.name!r}, nodes={self.n_nodes}, edges={self.n_edges})"
