"""Shared fixtures: small hand-built networks, the two-pairs matrix and synthetic corpora."""

from __future__ import annotations

from collections.abc import Callable, Sequence

import numpy as np
import pytest

from gcasim.network import SpatialNetwork
from gcasim.network.geo import offset_latlon
from gcasim.network.synth import DEFAULT_ORIGIN, SyntheticCorpus, synthetic_corpus

NetworkFactory = Callable[..., SpatialNetwork]


def build_network(
    coords_m: Sequence[tuple[float, float]],
    edges: Sequence[tuple[int, int]],
    name: str = "network",
    ids: Sequence[int] | None = None,
) -> SpatialNetwork:
    """Network from local (east, north) meter offsets and position-pair edges."""
    east = np.array([c[0] for c in coords_m], dtype=np.float64)
    north = np.array([c[1] for c in coords_m], dtype=np.float64)
    lat, lon = offset_latlon(DEFAULT_ORIGIN, east, north)
    node_ids = list(ids) if ids is not None else list(range(len(coords_m)))
    pairs = sorted((min(u, v), max(u, v)) for u, v in edges)
    return SpatialNetwork(node_ids, lat, lon, pairs, name=name)


def random_network(
    rng: np.random.Generator, n: int, p: float, name: str = "random"
) -> SpatialNetwork:
    coords = [(float(x), float(y)) for x, y in rng.uniform(0.0, 2_000.0, size=(n, 2))]
    upper = np.triu(rng.random((n, n)) < p, k=1)
    edges = [(int(i), int(j)) for i, j in zip(*np.nonzero(upper), strict=True)]
    return build_network(coords, edges, name=name)


@pytest.fixture
def network_factory() -> NetworkFactory:
    return build_network


@pytest.fixture
def p3() -> SpatialNetwork:
    return build_network([(0, 0), (100, 0), (200, 0)], [(0, 1), (1, 2)], name="p3")


@pytest.fixture
def k2() -> SpatialNetwork:
    return build_network([(0, 0), (100, 0)], [(0, 1)], name="k2")


@pytest.fixture
def k3() -> SpatialNetwork:
    return build_network([(0, 0), (100, 0), (50, 80)], [(0, 1), (1, 2), (0, 2)], name="k3")


@pytest.fixture
def k4() -> SpatialNetwork:
    coords = [(0, 0), (100, 0), (100, 100), (0, 100)]
    edges = [(i, j) for i in range(4) for j in range(i + 1, 4)]
    return build_network(coords, edges, name="k4")


@pytest.fixture
def cross() -> SpatialNetwork:
    """Right-angle 4-way intersection: centre 0 with arms east, north, west, south."""
    coords = [(0, 0), (100, 0), (0, 100), (-100, 0), (0, -100)]
    return build_network(coords, [(0, 1), (0, 2), (0, 3), (0, 4)], name="cross")


@pytest.fixture
def two_pairs() -> np.ndarray:
    """{A, B} and {C, D}: within-pair distance 1, cross distance 10."""
    return np.array(
        [
            [0.0, 1.0, 10.0, 10.0],
            [1.0, 0.0, 10.0, 10.0],
            [10.0, 10.0, 0.0, 1.0],
            [10.0, 10.0, 1.0, 0.0],
        ]
    )


@pytest.fixture(scope="session")
def small_corpus() -> SyntheticCorpus:
    return synthetic_corpus(per_family=3, node_range=(60, 120), seed=3)


@pytest.fixture(scope="session")
def family_corpus() -> SyntheticCorpus:
    return synthetic_corpus(per_family=8, node_range=(300, 800), seed=0)
