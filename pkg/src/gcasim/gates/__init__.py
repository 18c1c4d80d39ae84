"""Differentiable and hardened gate circuits."""

from __future__ import annotations

from .circuit import (
    Circuit,
    GateActivations,
    GateGradient,
    GateNetwork,
    HardGateNetwork,
    describe,
    gate_gradient,
    harden,
    hard_forward,
    init_gate_network,
    network_from_dict,
    sample_dominant,
    soft_forward,
)
from .ops import N_OPS, GateOp, evaluate_all

__all__ = [
    "Circuit",
    "GateActivations",
    "GateGradient",
    "GateNetwork",
    "GateOp",
    "HardGateNetwork",
    "N_OPS",
    "describe",
    "evaluate_all",
    "gate_gradient",
    "hard_forward",
    "harden",
    "init_gate_network",
    "network_from_dict",
    "sample_dominant",
    "soft_forward",
]
