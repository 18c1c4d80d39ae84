"""Tests for state/variable rank correlations."""

from __future__ import annotations

import math
from pathlib import Path

import pytest

from gcasim.analysis import (
    ExternalVariable,
    edge_length_variable,
    iterate_correlations,
    load_edge_variable,
    load_external_variable,
    spearman,
)
from gcasim.engine import RuleSpec
from gcasim.errors import ConfigurationError, ParseError
from gcasim.network.synth import grid


def test_spearman_reference_values() -> None:
    assert spearman([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8)
    assert spearman([1, 2, 3, 4], [4, 3, 2, 1]) == pytest.approx(-1.0)
    assert spearman([1, 1, 2, 3], [10, 10, 20, 30]) == pytest.approx(1.0)


def test_spearman_undefined_and_invalid() -> None:
    assert math.isnan(spearman([1, 1, 1], [1, 2, 3]))
    with pytest.raises(ConfigurationError):
        spearman([1, 2, 3], [1, 2])
    with pytest.raises(ConfigurationError):
        spearman([1, 2], [2, 1])


def test_initial_states_correlate_perfectly_with_degree() -> None:
    city = grid(6, 7)
    degree = ExternalVariable("degree", dict(zip(city.ids.tolist(), city.degree.tolist())))
    table = iterate_correlations(city, RuleSpec.laplacian(), [degree], T=3)
    assert [row.t for row in table.rows] == [0, 1, 2, 3]
    assert table.rows[0].rho == pytest.approx(1.0)
    assert table.rows[0].n == city.n_nodes
    assert len(table.series("degree")) == 4


def test_poorly_covered_variable_is_skipped() -> None:
    city = grid(4, 4)
    sparse = ExternalVariable("sparse", {0: 1.0, 1: 2.0})
    table = iterate_correlations(city, RuleSpec.laplacian(), [sparse], T=2)
    assert table.rows == []
    assert table.skipped == ["sparse"]


def test_edge_length_variable_covers_every_node() -> None:
    city = grid(3, 3)
    variable = edge_length_variable(city)
    assert variable.coverage(city) == 1.0
    assert variable.values[0] == pytest.approx(100.0, rel=1e-3)


def test_load_node_and_edge_variables(tmp_path: Path) -> None:
    nodes = tmp_path / "footfall.csv"
    nodes.write_text("# survey\nid,value\n1,3.5\n2,4\n9,1\n", encoding="utf-8")
    variable = load_external_variable(nodes)
    assert variable.name == "footfall"
    assert variable.values == {1: 3.5, 2: 4.0, 9: 1.0}

    edges = tmp_path / "speed.csv"
    edges.write_text("u,v,value\n1,2,10\n2,3,20\n", encoding="utf-8")
    averaged = load_edge_variable(edges, name="speed")
    assert averaged.values == {1: 10.0, 2: 15.0, 3: 20.0}


def test_variable_files_are_validated(tmp_path: Path) -> None:
    bad_header = tmp_path / "bad.csv"
    bad_header.write_text("node,value\n1,2\n", encoding="utf-8")
    with pytest.raises(ParseError):
        load_external_variable(bad_header)
    bad_value = tmp_path / "worse.csv"
    bad_value.write_text("id,value\n1,high\n", encoding="utf-8")
    with pytest.raises(ParseError) as excinfo:
        load_external_variable(bad_value)
    assert excinfo.value.line == 2


def test_table_serialisation(tmp_path: Path) -> None:
    city = grid(4, 5)
    degree = ExternalVariable("degree", dict(zip(city.ids.tolist(), city.degree.tolist())))
    table = iterate_correlations(city, RuleSpec.laplacian(), [degree], T=1, threads=2)
    path = table.to_csv(tmp_path / "corr.csv")
    assert path.read_text(encoding="utf-8").splitlines()[0] == "variable,t,rho,n"
    assert table.to_dict()["network"] == "grid"
