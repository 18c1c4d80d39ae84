"""The nine real-valued two-input gate operators."""

from __future__ import annotations

from enum import IntEnum

import torch

N_OPS = 9


class GateOp(IntEnum):
    """Gate operators in their fixed enumeration order; ties in hardening pick the lowest."""

    ADD = 0
    SUBTRACT = 1
    REVERSE_SUBTRACT = 2
    MAX = 3
    MIN = 4
    PASS_A = 5
    PASS_B = 6
    NEGATE_A = 7
    NEGATE_B = 8

    @property
    def tag(self) -> str:
        return _TAGS[self]

    @classmethod
    def from_tag(cls, tag: str) -> GateOp:
        try:
            return _BY_TAG[tag]
        except KeyError:
            raise ValueError(f"unknown gate op {tag!r}") from None

    def formula(self, a: str, b: str) -> str:
        return _FORMULAS[self].format(a=a, b=b)

    def apply(self, a: float, b: float) -> float:
        """Scalar evaluation, mostly for reports and tests."""
        ta = torch.tensor(a, dtype=torch.float64)
        tb = torch.tensor(b, dtype=torch.float64)
        return float(evaluate_all(ta, tb)[int(self)])


_TAGS = {
    GateOp.ADD: "Add",
    GateOp.SUBTRACT: "Subtract",
    GateOp.REVERSE_SUBTRACT: "ReverseSubtract",
    GateOp.MAX: "Max",
    GateOp.MIN: "Min",
    GateOp.PASS_A: "PassA",
    GateOp.PASS_B: "PassB",
    GateOp.NEGATE_A: "NegateA",
    GateOp.NEGATE_B: "NegateB",
}
_BY_TAG = {tag: op for op, tag in _TAGS.items()}
_FORMULAS = {
    GateOp.ADD: "({a} + {b})",
    GateOp.SUBTRACT: "({a} - {b})",
    GateOp.REVERSE_SUBTRACT: "({b} - {a})",
    GateOp.MAX: "max({a}, {b})",
    GateOp.MIN: "min({a}, {b})",
    GateOp.PASS_A: "{a}",
    GateOp.PASS_B: "{b}",
    GateOp.NEGATE_A: "-{a}",
    GateOp.NEGATE_B: "-{b}",
}


def evaluate_all(a: torch.Tensor, b: torch.Tensor) -> torch.Tensor:
    """All nine operator outputs stacked on a new trailing axis.

    `torch.maximum`/`torch.minimum` split the gradient 0.5/0.5 on exact ties.
    """
    return torch.stack(
        [
            a + b,
            a - b,
            b - a,
            torch.maximum(a, b),
            torch.minimum(a, b),
            a,
            b,
            -a,
            -b,
        ],
        dim=-1,
    )
