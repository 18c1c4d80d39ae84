"""Seeded synthetic street-like networks for harnesses, benchmarks and smoke runs."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from scipy.spatial import cKDTree

from gcasim.errors import ConfigurationError

from .geo import LatLon, offset_latlon
from .model import SpatialNetwork

if TYPE_CHECKING:  # pragma: no cover
    from gcasim.training.config import GroupSet

logger = logging.getLogger(__name__)

DEFAULT_ORIGIN: LatLon = (48.137, 11.575)
DEFAULT_SPACING_M = 100.0

Generator = Callable[[int, np.random.Generator, str], SpatialNetwork]


def _build(
    east: np.ndarray,
    north: np.ndarray,
    pairs: np.ndarray,
    name: str,
    origin: LatLon,
) -> SpatialNetwork:
    lat, lon = offset_latlon(origin, east, north)
    pairs = np.sort(np.asarray(pairs, dtype=np.int64).reshape(-1, 2), axis=1)
    pairs = np.unique(pairs[pairs[:, 0] != pairs[:, 1]], axis=0)
    return SpatialNetwork(np.arange(east.shape[0]), lat, lon, pairs, name=name)


def grid(
    rows: int,
    cols: int,
    spacing_m: float = DEFAULT_SPACING_M,
    name: str = "grid",
    origin: LatLon = DEFAULT_ORIGIN,
) -> SpatialNetwork:
    """Regular rows x cols lattice with 4-neighbour streets."""
    if rows < 1 or cols < 1:
        raise ConfigurationError("grid needs at least one row and one column")
    r, c = np.divmod(np.arange(rows * cols), cols)
    east = c * spacing_m
    north = r * spacing_m
    index = np.arange(rows * cols).reshape(rows, cols)
    horizontal = np.stack([index[:, :-1].ravel(), index[:, 1:].ravel()], axis=1)
    vertical = np.stack([index[:-1, :].ravel(), index[1:, :].ravel()], axis=1)
    pairs = np.vstack([horizontal, vertical])
    return _build(east.astype(np.float64), north.astype(np.float64), pairs, name, origin)


def perturbed_grid(
    n_nodes: int,
    rng: np.random.Generator,
    name: str = "perturbed-grid",
    origin: LatLon = DEFAULT_ORIGIN,
    jitter_m: float = 12.0,
    drop_fraction: float = 0.08,
) -> SpatialNetwork:
    """Lattice with jittered intersections and a fraction of street segments removed."""
    cols = max(2, int(round(math.sqrt(n_nodes))))
    rows = max(2, int(math.ceil(n_nodes / cols)))
    base = grid(rows, cols, name=name, origin=origin)
    pairs = base.edge_pairs()
    keep = rng.random(pairs.shape[0]) >= drop_fraction
    r, c = np.divmod(np.arange(rows * cols), cols)
    east = c * DEFAULT_SPACING_M + rng.normal(0.0, jitter_m, rows * cols)
    north = r * DEFAULT_SPACING_M + rng.normal(0.0, jitter_m, rows * cols)
    return _build(east, north, pairs[keep], name, origin)


def random_geometric(
    n_nodes: int,
    rng: np.random.Generator,
    name: str = "random-geometric",
    origin: LatLon = DEFAULT_ORIGIN,
    mean_degree: float = 5.0,
) -> SpatialNetwork:
    """Uniform points in a square joined when closer than the radius giving `mean_degree`."""
    side = DEFAULT_SPACING_M * math.sqrt(n_nodes)
    points = rng.uniform(0.0, side, size=(n_nodes, 2))
    radius = side * math.sqrt(mean_degree / (math.pi * max(n_nodes - 1, 1)))
    pairs = cKDTree(points).query_pairs(radius, output_type="ndarray")
    return _build(points[:, 0], points[:, 1], pairs, name, origin)


def radial_tree(
    n_nodes: int,
    rng: np.random.Generator,
    name: str = "radial-tree",
    origin: LatLon = DEFAULT_ORIGIN,
    branching: float = 0.35,
) -> SpatialNetwork:
    """Tree grown outward from a hub: each node continues its parent's bearing with noise."""
    east = np.zeros(n_nodes)
    north = np.zeros(n_nodes)
    bearing = np.zeros(n_nodes)
    tips = [0]
    children = np.zeros(n_nodes, dtype=np.int64)
    pairs: list[tuple[int, int]] = []
    for node in range(1, n_nodes):
        if node <= 6:
            parent = 0
            bearing[node] = 2 * math.pi * (node - 1) / 6
        else:
            parent = tips[int(rng.integers(len(tips)))]
            turn = rng.normal(0.0, 0.6) if rng.random() < branching else rng.normal(0.0, 0.15)
            bearing[node] = bearing[parent] + turn
        step = DEFAULT_SPACING_M * rng.uniform(0.7, 1.3)
        east[node] = east[parent] + step * math.sin(bearing[node])
        north[node] = north[parent] + step * math.cos(bearing[node])
        pairs.append((parent, node))
        children[parent] += 1
        tips.append(node)
        # Non-hub nodes stop extending once they have three children.
        if parent != 0 and children[parent] >= 3:
            tips.remove(parent)
    return _build(east, north, np.asarray(pairs), name, origin)


FAMILIES: dict[str, Generator] = {
    "grid": lambda n, rng, name: perturbed_grid(n, rng, name=name),
    "geometric": lambda n, rng, name: random_geometric(n, rng, name=name),
    "tree": lambda n, rng, name: radial_tree(n, rng, name=name),
}


@dataclass(frozen=True)
class SyntheticCorpus:
    networks: list[SpatialNetwork]
    labels: list[int]
    families: list[str]


def synthetic_corpus(
    per_family: int = 8,
    node_range: tuple[int, int] = (300, 800),
    seed: int = 0,
    families: Sequence[str] = tuple(FAMILIES),
) -> SyntheticCorpus:
    """`per_family` networks from each generator family, interleaved family-major."""
    lo, hi = node_range
    if per_family < 1 or lo < 4 or hi < lo:
        raise ConfigurationError("invalid synthetic corpus size")
    unknown = [family for family in families if family not in FAMILIES]
    if unknown:
        raise ConfigurationError(f"unknown synthetic family {unknown[0]!r}")
    rng = np.random.default_rng(seed)
    networks: list[SpatialNetwork] = []
    labels: list[int] = []
    for label, family in enumerate(families):
        for index in range(per_family):
            n_nodes = int(rng.integers(lo, hi + 1))
            networks.append(FAMILIES[family](n_nodes, rng, f"{family}-{index:02d}"))
            labels.append(label)
    logger.info(
        "synthetic_corpus_generated",
        extra={"networks": len(networks), "families": len(families), "seed": seed},
    )
    return SyntheticCorpus(networks=networks, labels=labels, families=list(families))


def synthetic_groups(
    train_groups: int = 4,
    validation_groups: int = 2,
    per_family: int = 4,
    node_range: tuple[int, int] = (300, 800),
    seed: int = 0,
) -> GroupSet:
    """Groups that each mix every family, mirroring the train/validation layout."""
    from gcasim.training.config import GroupSet

    total = train_groups + validation_groups
    corpus = synthetic_corpus(per_family * total, node_range, seed)
    n_families = len(corpus.families)
    groups: list[list[SpatialNetwork]] = [[] for _ in range(total)]
    for family in range(n_families):
        members = corpus.networks[family * per_family * total : (family + 1) * per_family * total]
        for offset, net in enumerate(members):
            groups[offset // per_family].append(net)
    return GroupSet(train=groups[:train_groups], validation=groups[train_groups:])
