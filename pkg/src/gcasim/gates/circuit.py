"""Layered differentiable gate circuits with fixed random wiring."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any, Literal, TypeAlias

import numpy as np
import numpy.typing as npt
import torch
import torch.nn as nn

from gcasim.errors import ConfigurationError, NumericalError

from .ops import N_OPS, GateOp, evaluate_all

logger = logging.getLogger(__name__)

LogitInit: TypeAlias = Literal["uniform-zero", "random"]
IntArray: TypeAlias = npt.NDArray[np.int64]
GateSpec: TypeAlias = tuple[GateOp | int, int, int]

# Logit gap for one-hot construction; exp(-1000) underflows to exactly 0.0 in float64.
ONE_HOT_GAP = 1000.0


def _check_shape(input_arity: int, layer_sizes: Sequence[int]) -> None:
    if input_arity < 1:
        raise ConfigurationError("input_arity must be at least 1")
    if not layer_sizes:
        raise ConfigurationError("layer_sizes must not be empty")
    if any(size < 1 for size in layer_sizes):
        raise ConfigurationError("every layer needs at least one gate")
    if layer_sizes[-1] != 1:
        raise ConfigurationError(f"last layer must have exactly 1 gate, got {layer_sizes[-1]}")


def _check_wiring(input_arity: int, wiring: Sequence[IntArray]) -> None:
    width = input_arity
    for layer, pairs in enumerate(wiring):
        if pairs.ndim != 2 or pairs.shape[1] != 2:
            raise ConfigurationError(f"layer {layer}: wiring must have shape (gates, 2)")
        if pairs.size and (pairs.min() < 0 or pairs.max() >= width):
            raise ConfigurationError(f"layer {layer}: wiring index outside previous width {width}")
        width = pairs.shape[0]


def random_wiring(
    input_arity: int, layer_sizes: Sequence[int], rng: np.random.Generator
) -> list[IntArray]:
    widths = [input_arity, *layer_sizes[:-1]]
    return [
        rng.integers(0, width, size=(size, 2), dtype=np.int64)
        for width, size in zip(widths, layer_sizes, strict=True)
    ]


class GateNetwork(nn.Module):
    """Soft circuit: every gate mixes the nine operators by the softmax of its logits.

    Layer `l` holds a `(gates, 9)` logit parameter and a `(gates, 2)` wiring buffer that
    indexes into the previous layer's outputs (layer 0 indexes the inputs).
    """

    def __init__(
        self,
        input_arity: int,
        wiring: Sequence[IntArray],
        logits: Sequence[torch.Tensor],
        wiring_seed: int | None = None,
    ) -> None:
        super().__init__()
        sizes = [int(pairs.shape[0]) for pairs in wiring]
        _check_shape(input_arity, sizes)
        _check_wiring(input_arity, wiring)
        if len(logits) != len(wiring):
            raise ConfigurationError("one logit tensor per layer is required")
        self.input_arity = int(input_arity)
        self.wiring_seed = wiring_seed
        self.layer_sizes: tuple[int, ...] = tuple(sizes)
        self.logits = nn.ParameterList()
        for layer, (pairs, values) in enumerate(zip(wiring, logits, strict=True)):
            values = torch.as_tensor(values, dtype=torch.float64)
            if values.shape != (pairs.shape[0], N_OPS):
                raise ConfigurationError(
                    f"layer {layer}: logits must have shape ({pairs.shape[0]}, {N_OPS})"
                )
            if not torch.isfinite(values).all():
                raise ConfigurationError(f"layer {layer}: logits must be finite")
            self.logits.append(nn.Parameter(values.clone()))
            wiring_tensor = torch.from_numpy(np.array(pairs, dtype=np.int64))
            self.register_buffer(f"wiring_{layer}", wiring_tensor)

    @property
    def n_gates(self) -> int:
        return sum(self.layer_sizes)

    def wiring(self, layer: int) -> torch.Tensor:
        buffer: torch.Tensor = getattr(self, f"wiring_{layer}")
        return buffer

    def wiring_arrays(self) -> list[IntArray]:
        return [self.wiring(layer).numpy().copy() for layer in range(len(self.layer_sizes))]

    def probabilities(self) -> list[torch.Tensor]:
        return [torch.softmax(logits, dim=-1) for logits in self.logits]

    def forward(self, inputs: torch.Tensor) -> torch.Tensor:
        return soft_forward(self, inputs).output

    # ------------------------------------------------------------------ constructors

    @classmethod
    def from_ops(
        cls,
        input_arity: int,
        layers: Sequence[Sequence[GateSpec]],
        dominance: float = ONE_HOT_GAP,
    ) -> GateNetwork:
        """Explicit circuit from `(op, in_a, in_b)` triples; each op leads by `dominance`."""
        wiring = [
            np.array([[a, b] for _, a, b in layer], dtype=np.int64).reshape(-1, 2)
            for layer in layers
        ]
        logits = []
        for layer in layers:
            values = torch.full((len(layer), N_OPS), -float(dominance), dtype=torch.float64)
            for gate, (op, _, _) in enumerate(layer):
                values[gate, int(op)] = 0.0
            logits.append(values)
        return cls(input_arity, wiring, logits)

    @classmethod
    def from_hard(cls, hard: HardGateNetwork, dominance: float = ONE_HOT_GAP) -> GateNetwork:
        """Soft circuit sharing `hard`'s wiring whose argmax reproduces its ops."""
        logits = []
        for ops in hard.ops:
            values = torch.full((ops.shape[0], N_OPS), -float(dominance), dtype=torch.float64)
            values[torch.arange(ops.shape[0]), torch.from_numpy(ops)] = 0.0
            logits.append(values)
        return cls(hard.input_arity, hard.wiring, logits, wiring_seed=hard.wiring_seed)

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": "soft",
            "input_arity": self.input_arity,
            "layer_sizes": list(self.layer_sizes),
            "wiring_seed": self.wiring_seed,
            "wiring": [pairs.tolist() for pairs in self.wiring_arrays()],
            "logits": [logits.detach().tolist() for logits in self.logits],
        }

    def __repr__(self) -> str:
        return (
            f"GateNetwork(input_arity={self.input_arity}, layer_sizes={list(self.layer_sizes)}, "
            f"wiring_seed={self.wiring_seed})"
        )


@dataclass(frozen=True, eq=False)
class HardGateNetwork:
    """Discrete circuit: one operator per gate, same wiring layout as `GateNetwork`."""

    input_arity: int
    wiring: tuple[IntArray, ...]
    ops: tuple[IntArray, ...]
    wiring_seed: int | None = None

    def __post_init__(self) -> None:
        _check_shape(self.input_arity, self.layer_sizes)
        _check_wiring(self.input_arity, self.wiring)
        for layer, (pairs, ops) in enumerate(zip(self.wiring, self.ops, strict=True)):
            if ops.shape != (pairs.shape[0],):
                raise ConfigurationError(f"layer {layer}: one op per gate is required")
            if ops.size and (ops.min() < 0 or ops.max() >= N_OPS):
                raise ConfigurationError(f"layer {layer}: op index outside 0..8")

    @property
    def layer_sizes(self) -> tuple[int, ...]:
        return tuple(int(pairs.shape[0]) for pairs in self.wiring)

    @property
    def n_gates(self) -> int:
        return sum(self.layer_sizes)

    def op_at(self, layer: int, gate: int) -> GateOp:
        return GateOp(int(self.ops[layer][gate]))

    def __call__(self, inputs: torch.Tensor) -> torch.Tensor:
        return hard_forward(self, inputs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HardGateNetwork):
            return NotImplemented
        return (
            self.input_arity == other.input_arity
            and len(self.wiring) == len(other.wiring)
            and all(np.array_equal(a, b) for a, b in zip(self.wiring, other.wiring, strict=True))
            and all(np.array_equal(a, b) for a, b in zip(self.ops, other.ops, strict=True))
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": "hard",
            "input_arity": self.input_arity,
            "layer_sizes": list(self.layer_sizes),
            "wiring_seed": self.wiring_seed,
            "wiring": [pairs.tolist() for pairs in self.wiring],
            "ops": [[GateOp(int(op)).tag for op in ops] for ops in self.ops],
        }


Circuit: TypeAlias = GateNetwork | HardGateNetwork


@dataclass
class GateActivations:
    """Result of a soft evaluation: the final output and every layer's outputs."""

    output: torch.Tensor
    layers: list[torch.Tensor]


def init_gate_network(
    input_arity: int,
    layer_sizes: Sequence[int],
    wiring_seed: int = 0,
    logit_init: LogitInit = "uniform-zero",
    logit_scale: float = 1.0,
) -> GateNetwork:
    """Seeded wiring; logits all zero (uniform mix) or standard-normal times `logit_scale`."""
    _check_shape(input_arity, list(layer_sizes))
    if logit_init not in ("uniform-zero", "random"):
        raise ConfigurationError(f"unknown logit_init {logit_init!r}")
    rng = np.random.default_rng(wiring_seed)
    wiring = random_wiring(input_arity, layer_sizes, rng)
    logits = []
    for size in layer_sizes:
        if logit_init == "random":
            logits.append(torch.from_numpy(rng.standard_normal((size, N_OPS)) * logit_scale))
        else:
            logits.append(torch.zeros((size, N_OPS), dtype=torch.float64))
    return GateNetwork(input_arity, wiring, logits, wiring_seed=wiring_seed)


def _as_inputs(inputs: torch.Tensor | Sequence[float], arity: int) -> torch.Tensor:
    x = torch.as_tensor(inputs, dtype=torch.float64)
    if x.shape[-1:] != (arity,):
        raise ConfigurationError(f"expected trailing input size {arity}, got {tuple(x.shape)}")
    return x


def _first_bad_gate(values: torch.Tensor, offset: int) -> int:
    bad = ~torch.isfinite(values)
    columns = bad.reshape(-1, values.shape[-1]).any(dim=0)
    return offset + int(torch.nonzero(columns)[0, 0])


def soft_forward(net: GateNetwork, inputs: torch.Tensor | Sequence[float]) -> GateActivations:
    """Evaluate on `(..., input_arity)` inputs; the output has the leading shape."""
    x = _as_inputs(inputs, net.input_arity)
    if not torch.isfinite(x).all():
        raise NumericalError("non-finite gate network input", location="input")
    layers: list[torch.Tensor] = []
    offset = 0
    for layer, logits in enumerate(net.logits):
        pairs = net.wiring(layer)
        candidates = evaluate_all(x[..., pairs[:, 0]], x[..., pairs[:, 1]])
        x = (candidates * torch.softmax(logits, dim=-1)).sum(dim=-1)
        if not torch.isfinite(x).all():
            gate = _first_bad_gate(x, offset)
            raise NumericalError(f"non-finite output at gate {gate}", location=gate)
        layers.append(x)
        offset += logits.shape[0]
    return GateActivations(output=x[..., 0], layers=layers)


def hard_forward(hard: HardGateNetwork, inputs: torch.Tensor | Sequence[float]) -> torch.Tensor:
    """Evaluate the discrete circuit on `(..., input_arity)` inputs."""
    x = _as_inputs(inputs, hard.input_arity)
    for pairs, ops in zip(hard.wiring, hard.ops, strict=True):
        index = torch.from_numpy(pairs)
        candidates = evaluate_all(x[..., index[:, 0]], x[..., index[:, 1]])
        selector = torch.from_numpy(ops).expand(candidates.shape[:-1]).unsqueeze(-1)
        x = torch.gather(candidates, -1, selector).squeeze(-1)
    return x[..., 0]


@dataclass
class GateGradient:
    logits: list[torch.Tensor]
    inputs: torch.Tensor
    output: float


def gate_gradient(
    net: GateNetwork, inputs: torch.Tensor | Sequence[float], upstream: float = 1.0
) -> GateGradient:
    """Reverse-mode gradients of `upstream * output` w.r.t. every logit and the inputs."""
    x = _as_inputs(inputs, net.input_arity).detach().clone().requires_grad_(True)
    output = soft_forward(net, x).output
    if output.ndim != 0:
        raise ConfigurationError("gate_gradient expects a single input vector")
    params = list(net.logits)
    grads = torch.autograd.grad(output * upstream, [*params, x], allow_unused=True)
    logit_grads = [
        grad if grad is not None else torch.zeros_like(param)
        for grad, param in zip(grads[:-1], params, strict=True)
    ]
    input_grad = grads[-1] if grads[-1] is not None else torch.zeros_like(x)
    return GateGradient(logits=logit_grads, inputs=input_grad.detach(), output=float(output))


def harden(net: GateNetwork) -> HardGateNetwork:
    """Per-gate argmax of the logits; `np.argmax` returns the lowest index on ties."""
    ops = tuple(
        np.argmax(logits.detach().cpu().numpy(), axis=-1).astype(np.int64) for logits in net.logits
    )
    return HardGateNetwork(net.input_arity, tuple(net.wiring_arrays()), ops, net.wiring_seed)


def sample_dominant(net: Circuit, rng_seed: int) -> HardGateNetwork:
    """Same wiring with every gate's op drawn uniformly from the nine candidates."""
    rng = np.random.default_rng(rng_seed)
    if isinstance(net, GateNetwork):
        wiring = tuple(net.wiring_arrays())
    else:
        wiring = net.wiring
    ops = tuple(rng.integers(0, N_OPS, size=pairs.shape[0], dtype=np.int64) for pairs in wiring)
    return HardGateNetwork(net.input_arity, wiring, ops, net.wiring_seed)


def describe(hard: HardGateNetwork) -> list[str]:
    """One formula per gate, e.g. `g1.0 = max(g0.1, g0.3)`; inputs are `x0..`."""
    names = [f"x{i}" for i in range(hard.input_arity)]
    lines: list[str] = []
    for layer, (pairs, ops) in enumerate(zip(hard.wiring, hard.ops, strict=True)):
        current = []
        for gate, ((a, b), op) in enumerate(zip(pairs, ops, strict=True)):
            name = f"g{layer}.{gate}"
            lines.append(f"{name} = {GateOp(int(op)).formula(names[a], names[b])}")
            current.append(name)
        names = current
    return lines


def network_from_dict(payload: dict[str, Any]) -> Circuit:
    try:
        kind = payload["kind"]
        arity = int(payload["input_arity"])
        wiring = [np.array(pairs, dtype=np.int64).reshape(-1, 2) for pairs in payload["wiring"]]
        seed = payload.get("wiring_seed")
        if kind == "soft":
            logits = [torch.tensor(values, dtype=torch.float64) for values in payload["logits"]]
            return GateNetwork(arity, wiring, logits, wiring_seed=seed)
        if kind == "hard":
            ops = tuple(
                np.array([GateOp.from_tag(tag) for tag in layer], dtype=np.int64).reshape(-1)
                for layer in payload["ops"]
            )
            return HardGateNetwork(arity, tuple(wiring), ops, seed)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigurationError):
            raise
        raise ConfigurationError(f"malformed gate network record: {exc}") from exc
    raise ConfigurationError(f"unknown gate network kind {kind!r}")
