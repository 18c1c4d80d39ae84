"""Tests for average-linkage clustering and dendrogram cuts."""

from __future__ import annotations

import numpy as np
import pytest
from scipy.cluster.hierarchy import linkage
from scipy.spatial.distance import squareform

from gcasim.clustering import cut, hierarchical_cluster
from gcasim.errors import ConfigurationError, DegenerateInputError, ValidationError


def test_two_pairs_merge_first_at_unit_height(two_pairs: np.ndarray) -> None:
    tree = hierarchical_cluster(two_pairs)
    assert [(m.left, m.right, m.height, m.size) for m in tree.merges] == [
        (0, 1, 1.0, 2),
        (2, 3, 1.0, 2),
        (4, 5, 10.0, 4),
    ]
    assert tree.to_linkage().shape == (3, 4)


def test_heights_match_scipy_average_linkage() -> None:
    rng = np.random.default_rng(17)
    points = rng.normal(size=(15, 3))
    matrix = np.sqrt(((points[:, None, :] - points[None, :, :]) ** 2).sum(axis=-1))
    ours = hierarchical_cluster(matrix).heights
    reference = linkage(squareform(matrix, checks=False), method="average")[:, 2]
    np.testing.assert_allclose(ours, reference, rtol=1e-12)
    assert np.all(np.diff(ours) >= 0)


def test_small_and_degenerate_inputs() -> None:
    assert len(hierarchical_cluster(np.array([[0.0, 2.0], [2.0, 0.0]])).merges) == 1
    zero = hierarchical_cluster(np.zeros((4, 4)))
    assert zero.heights.tolist() == [0.0, 0.0, 0.0]
    with pytest.raises(DegenerateInputError):
        hierarchical_cluster(np.zeros((1, 1)))
    with pytest.raises(ValidationError):
        hierarchical_cluster(np.zeros((2, 3)))


def test_cut_labels_follow_smallest_member(two_pairs: np.ndarray) -> None:
    order = [0, 2, 1, 3]
    tree = hierarchical_cluster(two_pairs[np.ix_(order, order)])
    assert cut(tree, 2).tolist() == [0, 1, 0, 1]
    assert cut(tree, 4).tolist() == [0, 1, 2, 3]
    assert cut(tree, 1).tolist() == [0, 0, 0, 0]
    with pytest.raises(ConfigurationError):
        cut(tree, 5)
