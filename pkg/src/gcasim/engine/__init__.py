"""Rule definitions and the synchronous automaton."""

from __future__ import annotations

from .automaton import (
    StateTrace,
    evolve,
    gca_step,
    iteration_quantiles,
    l1_normalize,
    laplacian_step,
)
from .rules import (
    RuleKind,
    RuleSpec,
    default_gate_triple,
    load_rule,
    rule_from_dict,
    rule_hash,
    save_rule,
)

__all__ = [
    "RuleKind",
    "RuleSpec",
    "StateTrace",
    "default_gate_triple",
    "evolve",
    "gca_step",
    "iteration_quantiles",
    "l1_normalize",
    "laplacian_step",
    "load_rule",
    "rule_from_dict",
    "rule_hash",
    "save_rule",
]
