"""Tests for cluster-count selection."""

from __future__ import annotations

import numpy as np
import pytest
from sklearn.metrics import adjusted_rand_score

from gcasim.clustering import select_k
from gcasim.engine import RuleSpec
from gcasim.errors import ConfigurationError, DegenerateInputError
from gcasim.network.synth import SyntheticCorpus
from gcasim.similarity import distance_matrix


def _blocks(sizes: list[int], within: float = 1.0, across: float = 10.0) -> np.ndarray:
    labels = np.repeat(np.arange(len(sizes)), sizes)
    matrix = np.where(labels[:, None] == labels[None, :], within, across)
    np.fill_diagonal(matrix, 0.0)
    return matrix.astype(np.float64)


def test_two_pairs_select_two(two_pairs: np.ndarray) -> None:
    result = select_k(two_pairs)
    assert result.k == 2
    assert result.labels.tolist() == [0, 0, 1, 1]
    assert result.silhouette == pytest.approx(0.9)
    assert result.ch == pytest.approx(200.0)
    assert result.db == pytest.approx(0.1)
    assert [row.k for row in result.ranks] == [2, 3]
    assert not result.degenerate


def test_three_blocks_select_three() -> None:
    result = select_k(_blocks([3, 3, 3]))
    assert result.k == 3
    assert result.labels.tolist() == [0, 0, 0, 1, 1, 1, 2, 2, 2]
    best = next(row for row in result.ranks if row.k == 3)
    assert best.silhouette_rank == 1
    assert best.db_rank == 1


def test_zero_matrix_is_flagged_degenerate() -> None:
    result = select_k(np.zeros((5, 5)))
    assert result.degenerate
    assert result.k == 2


def test_deterministic_and_serialisable() -> None:
    matrix = _blocks([2, 4, 3])
    first, second = select_k(matrix), select_k(matrix)
    assert first.k == second.k
    assert first.labels.tolist() == second.labels.tolist()
    payload = first.to_dict()
    assert payload["k"] == first.k
    assert len(payload["linkage"]) == 8
    assert {"k", "silhouette", "db", "rank_sum"} <= set(payload["ranks"][0])


def test_k_range_validation(two_pairs: np.ndarray) -> None:
    with pytest.raises(DegenerateInputError):
        select_k(np.zeros((2, 2)))
    with pytest.raises(ConfigurationError):
        select_k(two_pairs, k_max=4)
    with pytest.raises(ConfigurationError):
        select_k(two_pairs, k_min=1)


def test_laplacian_recovers_three_synthetic_families(family_corpus: SyntheticCorpus) -> None:
    matrix = distance_matrix(family_corpus.networks, RuleSpec.laplacian(), T=5)
    result = select_k(matrix)
    assert result.k == 3
    assert result.silhouette >= 0.5
    assert adjusted_rand_score(family_corpus.labels, result.labels) >= 0.9
