"""Histograms, divergences and trace distances."""

from __future__ import annotations

from .distance import (
    DistanceMatrix,
    distance_matrix,
    pair_distance,
    pairwise_matrix,
    soft_distance_matrix,
    trace_distance,
)
from .divergence import LN2, jsd, jsd_numpy, jsd_tensor
from .histogram import DEFAULT_BINS, SoftHistogram, soft_histogram

__all__ = [
    "DEFAULT_BINS",
    "DistanceMatrix",
    "LN2",
    "SoftHistogram",
    "distance_matrix",
    "jsd",
    "jsd_numpy",
    "jsd_tensor",
    "pair_distance",
    "pairwise_matrix",
    "soft_distance_matrix",
    "soft_histogram",
    "trace_distance",
]
