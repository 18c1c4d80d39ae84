"""Tests for the distance-only cluster validity indices."""

from __future__ import annotations

import math

import numpy as np
import pytest
import torch

from gcasim.clustering import (
    ch_index,
    db_index,
    evaluate,
    medoids,
    silhouette,
    soft_assignments,
    soft_silhouette,
    soft_silhouette_tensor,
)
from gcasim.errors import ConfigurationError, DegenerateInputError

PAIRS = [0, 0, 1, 1]


def _brute_force_silhouette(matrix: np.ndarray, labels: np.ndarray) -> float:
    scores = []
    for i in range(matrix.shape[0]):
        own = labels == labels[i]
        if own.sum() == 1:
            scores.append(0.0)
            continue
        a = matrix[i, own & (np.arange(len(labels)) != i)].mean()
        b = min(matrix[i, labels == c].mean() for c in set(labels.tolist()) if c != labels[i])
        scores.append((b - a) / max(a, b) if max(a, b) > 0 else 0.0)
    return float(np.mean(scores))


def test_two_pairs_reference_values(two_pairs: np.ndarray) -> None:
    assert silhouette(two_pairs, PAIRS) == pytest.approx(0.9)
    assert ch_index(two_pairs, PAIRS) == pytest.approx(200.0)
    assert db_index(two_pairs, PAIRS) == pytest.approx(0.1)
    assert medoids(two_pairs, PAIRS).tolist() == [0, 2]


def test_indices_ignore_cluster_id_values(two_pairs: np.ndarray) -> None:
    a = evaluate(two_pairs, PAIRS).as_dict()
    b = evaluate(two_pairs, [7, 7, 3, 3]).as_dict()
    assert b == pytest.approx(a)


def test_silhouette_matches_brute_force() -> None:
    rng = np.random.default_rng(8)
    for n in (6, 13, 30):
        upper = np.triu(rng.uniform(0.1, 2.0, size=(n, n)), k=1)
        matrix = upper + upper.T
        labels = rng.integers(0, 3, size=n)
        labels[:3] = [0, 1, 2]
        assert silhouette(matrix, labels) == pytest.approx(
            _brute_force_silhouette(matrix, labels), abs=1e-12
        )


def test_duplicated_points_and_sentinels() -> None:
    matrix = np.array(
        [
            [0.0, 0.0, 5.0, 5.0],
            [0.0, 0.0, 5.0, 5.0],
            [5.0, 5.0, 0.0, 0.0],
            [5.0, 5.0, 0.0, 0.0],
        ]
    )
    assert silhouette(matrix, PAIRS) == 1.0
    assert ch_index(matrix, PAIRS) == math.inf
    assert db_index(matrix, PAIRS) == 0.0
    zero = np.zeros((4, 4))
    assert silhouette(zero, PAIRS) == 0.0
    assert db_index(zero, PAIRS) == math.inf


def test_wrong_assignment_lowers_ch(two_pairs: np.ndarray) -> None:
    assert ch_index(two_pairs, [0, 1, 1, 1]) < ch_index(two_pairs, PAIRS)


def test_wider_separation_is_not_worse(two_pairs: np.ndarray) -> None:
    labels = np.array(PAIRS)
    cross = labels[:, None] != labels[None, :]
    wider = np.where(cross, two_pairs * 3.0, two_pairs)
    assert silhouette(wider, PAIRS) >= silhouette(two_pairs, PAIRS)
    assert db_index(wider, PAIRS) <= db_index(two_pairs, PAIRS)


def test_soft_silhouette_approaches_hard_at_low_temperature(two_pairs: np.ndarray) -> None:
    assert soft_silhouette(two_pairs, PAIRS, temperature=1e-3) == pytest.approx(0.9)
    warm = soft_silhouette(two_pairs, PAIRS, temperature=5.0)
    assert -1.0 <= warm < 0.9


def test_equidistant_items_get_uniform_assignments() -> None:
    matrix = np.ones((4, 4)) - np.eye(4)
    probs = soft_assignments(matrix, PAIRS, temperature=0.5)
    uniform = torch.tensor([0.5, 0.5], dtype=torch.float64)
    torch.testing.assert_close(probs[1], uniform)
    torch.testing.assert_close(probs[3], uniform)
    with pytest.raises(ConfigurationError):
        soft_assignments(matrix, PAIRS, temperature=0.0)


def test_soft_silhouette_gradient_flows_through_distances(two_pairs: np.ndarray) -> None:
    distances = torch.tensor(two_pairs, dtype=torch.float64, requires_grad=True)
    soft_silhouette_tensor(distances, PAIRS).backward()
    assert distances.grad is not None
    assert bool(torch.isfinite(distances.grad).all())
    assert float(distances.grad.abs().sum()) > 0.0


def test_single_cluster_is_degenerate(two_pairs: np.ndarray) -> None:
    with pytest.raises(DegenerateInputError):
        silhouette(two_pairs, [0, 0, 0, 0])
    with pytest.raises(DegenerateInputError):
        db_index(two_pairs, [1, 1, 1, 1])
    with pytest.raises(ConfigurationError):
        silhouette(two_pairs, [0, 1])


def test_evaluate_reports_nan_ch_for_singletons(two_pairs: np.ndarray) -> None:
    indices = evaluate(two_pairs, [0, 1, 2, 3])
    assert indices.silhouette == 0.0
    assert math.isnan(indices.ch)
    assert set(indices.as_dict()) == {"silhouette", "soft_silhouette", "ch", "db"}
