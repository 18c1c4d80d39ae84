"""Tests for soft and hard gate circuits."""

from __future__ import annotations

import numpy as np
import pytest
import torch

from gcasim.errors import ConfigurationError, NumericalError
from gcasim.gates import (
    GateNetwork,
    GateOp,
    HardGateNetwork,
    describe,
    gate_gradient,
    hard_forward,
    harden,
    init_gate_network,
    network_from_dict,
    sample_dominant,
    soft_forward,
)


def _single_gate(op: GateOp) -> GateNetwork:
    return GateNetwork.from_ops(2, [[(op, 0, 1)]])


def _wired_single_gate() -> GateNetwork:
    wiring = [np.array([[0, 1]], dtype=np.int64)]
    return GateNetwork(2, wiring, [torch.zeros((1, 9), dtype=torch.float64)])


def test_uniform_gate_averages_all_operators() -> None:
    out = soft_forward(_wired_single_gate(), [2.0, 3.0]).output
    assert out.item() == pytest.approx(10.0 / 9.0)


def test_one_hot_gate_is_exact() -> None:
    out = soft_forward(_single_gate(GateOp.ADD), [2.0, 3.0]).output
    assert out.item() == 5.0


def test_soft_forward_batches_over_leading_axes() -> None:
    net = _single_gate(GateOp.MAX)
    inputs = torch.tensor([[1.0, 4.0], [7.0, -2.0], [0.5, 0.5]], dtype=torch.float64)
    result = soft_forward(net, inputs)
    assert result.output.tolist() == [4.0, 7.0, 0.5]
    assert len(result.layers) == 1


def test_logit_gradient_of_uniform_gate() -> None:
    grads = gate_gradient(_wired_single_gate(), [2.0, 3.0])
    ops = torch.tensor([GateOp(k).apply(2.0, 3.0) for k in range(9)], dtype=torch.float64)
    expected = (ops - 10.0 / 9.0) / 9.0
    torch.testing.assert_close(grads.logits[0][0], expected)
    torch.testing.assert_close(
        grads.inputs, torch.tensor([2.0 / 9.0, 2.0 / 9.0], dtype=torch.float64)
    )
    assert grads.output == pytest.approx(10.0 / 9.0)


def test_gradcheck_on_random_logits() -> None:
    net = init_gate_network(4, (6, 3, 1), wiring_seed=4, logit_init="random")
    x = torch.tensor([0.3, -1.2, 2.5, 0.9], dtype=torch.float64, requires_grad=True)
    assert torch.autograd.gradcheck(lambda inputs: soft_forward(net, inputs).output, (x,))


def test_harden_picks_argmax_and_lowest_index_on_ties() -> None:
    net = init_gate_network(2, (3, 1), wiring_seed=1)
    with torch.no_grad():
        net.logits[0][1, int(GateOp.MIN)] = 2.0
    hard = harden(net)
    assert hard.op_at(0, 0) is GateOp.ADD
    assert hard.op_at(0, 1) is GateOp.MIN
    assert hard.op_at(1, 0) is GateOp.ADD
    assert all(np.array_equal(a, b) for a, b in zip(hard.wiring, net.wiring_arrays(), strict=True))


def test_hardened_one_hot_network_matches_soft_output() -> None:
    net = GateNetwork.from_ops(
        3,
        [
            [(GateOp.MAX, 0, 1), (GateOp.SUBTRACT, 2, 0)],
            [(GateOp.ADD, 0, 1)],
        ],
    )
    inputs = torch.tensor([[1.0, 5.0, 2.0], [-3.0, -4.0, 0.0]], dtype=torch.float64)
    soft = soft_forward(net, inputs).output
    hard = hard_forward(harden(net), inputs)
    torch.testing.assert_close(soft, hard)
    assert hard.tolist() == [6.0, 0.0]


def test_sample_dominant_is_seeded_and_uniform() -> None:
    net = init_gate_network(2, (900, 1), wiring_seed=2)
    first = sample_dominant(net, rng_seed=7)
    assert first == sample_dominant(net, rng_seed=7)
    assert first != sample_dominant(net, rng_seed=8)
    counts = np.bincount(first.ops[0], minlength=9)
    assert counts.sum() == 900
    assert np.all((counts > 60) & (counts < 140))


def test_shape_and_wiring_validation() -> None:
    with pytest.raises(ConfigurationError):
        init_gate_network(2, (3, 2))
    with pytest.raises(ConfigurationError):
        init_gate_network(0, (1,))
    with pytest.raises(ConfigurationError):
        GateNetwork(2, [np.array([[0, 2]])], [torch.zeros((1, 9))])
    with pytest.raises(ConfigurationError):
        HardGateNetwork(2, (np.array([[0, 1]]),), (np.array([9]),))
    with pytest.raises(ConfigurationError):
        soft_forward(_single_gate(GateOp.ADD), [1.0, 2.0, 3.0])


def test_non_finite_values_raise_numerical_error() -> None:
    with pytest.raises(NumericalError) as excinfo:
        soft_forward(_single_gate(GateOp.ADD), [float("nan"), 1.0])
    assert excinfo.value.location == "input"
    with pytest.raises(NumericalError) as excinfo:
        soft_forward(_single_gate(GateOp.ADD), [1e308, 1e308])
    assert excinfo.value.location == 0


def test_dict_round_trip_for_soft_and_hard() -> None:
    soft = init_gate_network(4, (8, 4, 1), wiring_seed=3, logit_init="random")
    restored = network_from_dict(soft.to_dict())
    assert isinstance(restored, GateNetwork)
    for a, b in zip(soft.logits, restored.logits, strict=True):
        torch.testing.assert_close(a, b)
    hard = sample_dominant(soft, rng_seed=1)
    assert network_from_dict(hard.to_dict()) == hard
    with pytest.raises(ConfigurationError):
        network_from_dict({"kind": "fuzzy", "input_arity": 2, "wiring": []})


def test_describe_lists_one_formula_per_gate() -> None:
    net = GateNetwork.from_ops(
        2, [[(GateOp.MAX, 0, 1), (GateOp.NEGATE_A, 1, 0)], [(GateOp.ADD, 0, 1)]]
    )
    assert describe(harden(net)) == [
        "g0.0 = max(x0, x1)",
        "g0.1 = -x1",
        "g1.0 = (g0.0 + g0.1)",
    ]
