"""Tests for half-edge features and initial states."""

from __future__ import annotations

import numpy as np
import pytest

from gcasim.network import SpatialNetwork, init_states, mean_edge_length
from gcasim.network.synth import SyntheticCorpus

from ..conftest import NetworkFactory


def _half_edge(net: SpatialNetwork, u: int, v: int) -> int:
    return int(np.flatnonzero((net.src == u) & (net.dst == v))[0])


def test_initial_states_are_degrees(cross: SpatialNetwork) -> None:
    states = init_states(cross)
    assert states.dtype.is_floating_point
    assert states.tolist() == [4.0, 1.0, 1.0, 1.0, 1.0]


def test_four_way_cross_has_quarter_gaps(cross: SpatialNetwork) -> None:
    features = cross.features
    for arm in range(1, 5):
        h = _half_edge(cross, 0, arm)
        assert features.theta[h] == pytest.approx(0.5, abs=1e-6)
        assert features.d[h] == pytest.approx(1.0, rel=1e-6)


def test_degree_two_node_theta_is_one(network_factory: NetworkFactory) -> None:
    bend = network_factory([(0, 0), (100, 0), (100, 70)], [(0, 1), (1, 2)])
    features = bend.features
    assert features.theta[_half_edge(bend, 1, 0)] == pytest.approx(1.0)
    assert features.theta[_half_edge(bend, 1, 2)] == pytest.approx(1.0)


def test_normalised_length_relative_to_longest_outgoing(network_factory: NetworkFactory) -> None:
    net = network_factory([(0, 0), (100, 0), (-200, 0)], [(0, 1), (0, 2)])
    features = net.features
    assert features.d[_half_edge(net, 0, 1)] == pytest.approx(0.5, rel=1e-6)
    assert features.d[_half_edge(net, 0, 2)] == pytest.approx(1.0)
    assert features.length_m[_half_edge(net, 0, 1)] == pytest.approx(100.0, rel=1e-3)


def test_leaf_half_edges_get_unit_features(p3: SpatialNetwork) -> None:
    features = p3.features
    for leaf, centre in ((0, 1), (2, 1)):
        feature = features[_half_edge(p3, leaf, centre)]
        assert feature.d == 1.0
        assert feature.theta == 1.0


def test_feature_ranges_on_synthetic_network(small_corpus: SyntheticCorpus) -> None:
    for net in small_corpus.networks:
        features = net.features
        assert len(features) == net.n_half_edges
        assert np.all((features.d > 0) & (features.d <= 1.0))
        assert np.all((features.theta > 0) & (features.theta <= 1.0 + 1e-12))


def test_mean_edge_length(network_factory: NetworkFactory) -> None:
    net = network_factory([(0, 0), (100, 0), (-300, 0), (5_000, 0)], [(0, 1), (0, 2)])
    means = mean_edge_length(net)
    assert means[0] == pytest.approx(200.0, rel=1e-3)
    assert means[3] == 0.0


def test_empty_edge_set_gives_empty_features(network_factory: NetworkFactory) -> None:
    lonely = network_factory([(0, 0), (50, 0)], [])
    assert len(lonely.features) == 0


def test_theta_sums_to_two_at_junctions(small_corpus: SyntheticCorpus) -> None:
    net = small_corpus.networks[0]
    totals = np.zeros(net.n_nodes)
    np.add.at(totals, net.src, net.features.theta)
    junctions = net.degree >= 2
    np.testing.assert_allclose(totals[junctions], 2.0, atol=1e-9)


def test_longest_outgoing_edge_has_unit_length(small_corpus: SyntheticCorpus) -> None:
    for net in small_corpus.networks:
        best = np.zeros(net.n_nodes)
        np.maximum.at(best, net.src, net.features.d)
        assert np.all(best[net.degree > 0] == 1.0)
