"""Tests for the tile-based internal consistency index."""

from __future__ import annotations

import numpy as np
import pytest

from gcasim.analysis import consistency_index, internal_consistency
from gcasim.engine import RuleSpec
from gcasim.errors import DegenerateInputError, ValidationError
from gcasim.network.synth import grid, radial_tree, random_geometric
from gcasim.similarity import LN2, distance_matrix


def test_index_reference_value() -> None:
    matrix = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, LN2], [0.0, LN2, 0.0]])
    assert consistency_index(matrix) == pytest.approx(2.0 / 3.0, abs=1e-4)
    assert consistency_index(np.zeros((4, 4))) == 1.0


def test_index_needs_two_tiles() -> None:
    with pytest.raises(DegenerateInputError):
        consistency_index(np.zeros((1, 1)))
    with pytest.raises(ValidationError):
        consistency_index(np.zeros((2, 3)))


def test_tiles_of_a_lattice_are_identical() -> None:
    city = grid(30, 30, name="lattice")
    report = internal_consistency(
        city, RuleSpec.laplacian(), window_m=3_000.0, tile_m=1_000.0, min_nodes=10
    )
    assert report.K == 9
    assert report.matrix.names == report.tile_ids
    assert report.tile_ids[0] == "r0c0"
    assert report.dropped == 0
    assert report.ic == pytest.approx(1.0, abs=1e-9)
    payload = report.to_dict()
    assert payload["K"] == 9
    assert payload["distance"]["min"] <= payload["distance"]["mean"] <= payload["distance"]["max"]


def test_single_tile_is_degenerate() -> None:
    with pytest.raises(DegenerateInputError):
        internal_consistency(grid(5, 5), RuleSpec.laplacian(), window_m=1_000.0, tile_m=1_000.0)


@pytest.mark.parametrize("family", ["tree", "geometric"])
def test_swapping_in_a_foreign_tile_lowers_the_index(family: str) -> None:
    tiles = [grid(10, 10, name=f"tile{i}") for i in range(9)]
    rule = RuleSpec.laplacian()
    uniform = consistency_index(distance_matrix(tiles, rule, T=5))
    assert uniform == pytest.approx(1.0, abs=1e-12)

    rng = np.random.default_rng(8)
    make = radial_tree if family == "tree" else random_geometric
    swapped = [*tiles[:-1], make(100, rng, name="foreign")]
    mixed = consistency_index(distance_matrix(swapped, rule, T=5))
    assert mixed < uniform

    twice = [*swapped[:-2], make(100, rng, name="foreign2"), swapped[-1]]
    assert consistency_index(distance_matrix(twice, rule, T=5)) < mixed
