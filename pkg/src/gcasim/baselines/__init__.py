"""Reference similarity methods: degreeJSD and NetSimile."""

from __future__ import annotations

from .degree import degree_distributions, degree_jsd, degree_jsd_matrix
from .netsimile import NetSimileSignature, netsimile_distance, netsimile_matrix, node_features

__all__ = [
    "NetSimileSignature",
    "degree_distributions",
    "degree_jsd",
    "degree_jsd_matrix",
    "netsimile_distance",
    "netsimile_matrix",
    "node_features",
]
