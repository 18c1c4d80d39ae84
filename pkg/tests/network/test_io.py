"""Tests for network readers and writers."""

from __future__ import annotations

from pathlib import Path

import networkx as nx
import numpy as np
import pytest

from gcasim.artifacts import ArtifactMeta
from gcasim.errors import DataError, ParseError, ValidationError
from gcasim.network import (
    NetworkFormat,
    SpatialNetwork,
    load_network,
    save_edge_list,
    save_network,
)
from gcasim.network.synth import grid, random_geometric


def _same_network(a: SpatialNetwork, b: SpatialNetwork) -> None:
    assert a.ids.tolist() == b.ids.tolist()
    np.testing.assert_allclose(a.lat, b.lat, rtol=0, atol=1e-12)
    np.testing.assert_allclose(a.lon, b.lon, rtol=0, atol=1e-12)
    assert a.edge_ids() == b.edge_ids()


def test_json_save_and_load(tmp_path: Path) -> None:
    net = grid(3, 4, name="block")
    path = save_network(net, tmp_path / "block.json", ArtifactMeta(config_hash="abc"))
    loaded = load_network(path)
    assert loaded.name == "block"
    _same_network(net, loaded)


def test_edge_list_directory_with_meta_comment(tmp_path: Path) -> None:
    net = grid(2, 3)
    directory = save_edge_list(net, tmp_path / "town", ArtifactMeta(seeds={"seed": 1}))
    assert (directory / "nodes.csv").read_text(encoding="utf-8").startswith("# gca-sim")
    loaded = load_network(directory)
    assert loaded.name == "town"
    _same_network(net, loaded)


def test_graphml_with_lat_lon_attributes(tmp_path: Path) -> None:
    graph = nx.Graph()
    graph.add_node(3, lat=48.0, lon=11.0)
    graph.add_node(1, lat=48.001, lon=11.0)
    graph.add_node(2, lat=48.0, lon=11.001)
    graph.add_edges_from([(1, 2), (2, 3)])
    path = tmp_path / "village.graphml"
    nx.write_graphml(graph, path)
    net = load_network(path)
    assert net.ids.tolist() == [1, 2, 3]
    assert net.edge_ids() == [(1, 2), (2, 3)]
    assert net.name == "village"


def test_format_detection(tmp_path: Path) -> None:
    assert NetworkFormat.detect(tmp_path) is NetworkFormat.EDGE_LIST_CSV
    assert NetworkFormat.detect(tmp_path / "a.graphml") is NetworkFormat.GRAPHML
    assert NetworkFormat.detect(tmp_path / "a.json") is NetworkFormat.JSON
    with pytest.raises(ParseError):
        NetworkFormat.detect(tmp_path / "a.shp")


def test_missing_column_reports_line(tmp_path: Path) -> None:
    (tmp_path / "nodes.csv").write_text("id,lat\n1,48.0\n", encoding="utf-8")
    (tmp_path / "edges.csv").write_text("u,v\n", encoding="utf-8")
    with pytest.raises(ParseError) as excinfo:
        load_network(tmp_path)
    assert excinfo.value.line == 1
    assert "lon" in str(excinfo.value)


def test_bad_coordinate_is_parse_error(tmp_path: Path) -> None:
    (tmp_path / "nodes.csv").write_text("id,lat,lon\n1,48.0,11.0\n2,north,11.0\n", encoding="utf-8")
    (tmp_path / "edges.csv").write_text("u,v\n1,2\n", encoding="utf-8")
    with pytest.raises(ParseError) as excinfo:
        load_network(tmp_path)
    assert excinfo.value.line == 3


def test_unknown_edge_endpoint_is_validation_error(tmp_path: Path) -> None:
    (tmp_path / "nodes.csv").write_text("id,lat,lon\n1,48.0,11.0\n", encoding="utf-8")
    (tmp_path / "edges.csv").write_text("u,v\n1,7\n", encoding="utf-8")
    with pytest.raises(ValidationError):
        load_network(tmp_path)


def test_missing_file_and_bad_json_version(tmp_path: Path) -> None:
    with pytest.raises(ValidationError):
        load_network(tmp_path / "absent.json")
    bad = tmp_path / "old.json"
    bad.write_text('{"version": "gca-net/0", "nodes": [], "edges": []}', encoding="utf-8")
    with pytest.raises(ParseError):
        load_network(bad)


def _bit_identical(a: SpatialNetwork, b: SpatialNetwork) -> None:
    np.testing.assert_array_equal(a.ids, b.ids)
    np.testing.assert_array_equal(a.lat, b.lat)
    np.testing.assert_array_equal(a.lon, b.lon)
    np.testing.assert_array_equal(a.edge_pairs(), b.edge_pairs())
    np.testing.assert_array_equal(a.features.d, b.features.d)
    np.testing.assert_array_equal(a.features.theta, b.features.theta)


def test_json_reserialisation_is_idempotent(tmp_path: Path) -> None:
    source = random_geometric(120, np.random.default_rng(4), name="scatter")
    first = load_network(save_network(source, tmp_path / "first.json"))
    second = load_network(save_network(first, tmp_path / "second.json"))
    _bit_identical(source, first)
    _bit_identical(first, second)
    save_network(second, tmp_path / "third.json")
    assert (tmp_path / "second.json").read_bytes() == (tmp_path / "third.json").read_bytes()


def test_edge_list_reserialisation_is_idempotent(tmp_path: Path) -> None:
    source = random_geometric(80, np.random.default_rng(5), name="scatter")
    first = load_network(save_edge_list(source, tmp_path / "first"))
    second = load_network(save_edge_list(first, tmp_path / "second"))
    _bit_identical(source, first)
    _bit_identical(first, second)
    for table in ("nodes.csv", "edges.csv"):
        assert (tmp_path / "first" / table).read_bytes() == (
            tmp_path / "second" / table
        ).read_bytes()


def test_unreadable_inputs_raise_data_error(tmp_path: Path) -> None:
    not_a_file = tmp_path / "folder.json"
    not_a_file.mkdir()
    with pytest.raises(DataError):
        load_network(not_a_file, NetworkFormat.JSON)
    town = tmp_path / "town"
    town.mkdir()
    (town / "nodes.csv").mkdir()
    (town / "edges.csv").write_text("u,v\n", encoding="utf-8")
    with pytest.raises(DataError):
        load_network(town)
