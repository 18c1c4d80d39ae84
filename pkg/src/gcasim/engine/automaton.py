"""Synchronous state evolution over a spatial network."""

from __future__ import annotations

import logging
import time
from collections.abc import Sequence
from contextlib import nullcontext
from dataclasses import dataclass
from typing import Any, Literal, TypeAlias

import numpy as np
import numpy.typing as npt
import torch

from gcasim.errors import ConfigurationError, NumericalError
from gcasim.gates import Circuit, HardGateNetwork, hard_forward, harden, soft_forward
from gcasim.network import SpatialNetwork, init_states
from gcasim.telemetry import get_meter, get_tracer

from .rules import RuleSpec

logger = logging.getLogger(__name__)
tracer = get_tracer("gcasim.engine.automaton")
meter = get_meter("gcasim.engine.automaton")

STEP_COUNTER = meter.create_counter(
    "gcasim_engine_steps",
    unit="1",
    description="Synchronous automaton steps executed",
)
EVOLVE_DURATION = meter.create_histogram(
    "gcasim_engine_evolve_seconds",
    unit="s",
    description="Wall time of one evolve call",
)

Mode: TypeAlias = Literal["soft", "hard"]

ATTENTION_EPS = 1e-12
DEFAULT_QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)


def neighbour_mean(net: SpatialNetwork, s: torch.Tensor) -> torch.Tensor:
    src, dst = net.torch_index
    totals = torch.zeros_like(s).index_add_(0, src, s[dst])
    degree = net.torch_degree
    return torch.where(degree > 0, totals / degree.clamp(min=1.0), torch.zeros_like(s))


def laplacian_step(net: SpatialNetwork, s: torch.Tensor) -> torch.Tensor:
    """`s[u] - mean(s[v] for v in N(u))`; isolated nodes keep their state."""
    _check_states(net, s)
    return s - neighbour_mean(net, s)


def l1_normalize(net: SpatialNetwork, weights: torch.Tensor) -> torch.Tensor:
    """Divide each half-edge weight by the L1 norm of its origin's weights (plus epsilon)."""
    src, _ = net.torch_index
    norm = torch.zeros(net.n_nodes, dtype=weights.dtype).index_add_(0, src, weights.abs())
    return weights / (norm[src] + ATTENTION_EPS)


def _run(circuit: Circuit, inputs: torch.Tensor, mode: Mode) -> torch.Tensor:
    if isinstance(circuit, HardGateNetwork):
        return hard_forward(circuit, inputs)
    if mode == "hard":
        return hard_forward(harden(circuit), inputs)
    return soft_forward(circuit, inputs).output


def _check_states(net: SpatialNetwork, s: torch.Tensor) -> None:
    if s.shape != (net.n_nodes,):
        raise ConfigurationError(
            f"state vector has shape {tuple(s.shape)}, expected ({net.n_nodes},)"
        )


def _raise_non_finite(net: SpatialNetwork, s: torch.Tensor, iteration: int) -> None:
    bad = torch.nonzero(~torch.isfinite(s))
    node_id = int(net.ids[int(bad[0, 0])])
    raise NumericalError(
        f"non-finite state at node {node_id} in iteration {iteration}",
        location=node_id,
        iteration=iteration,
    )


def gca_step(
    net: SpatialNetwork,
    s: torch.Tensor,
    rule: RuleSpec,
    mode: Mode = "hard",
    iteration: int = 1,
) -> torch.Tensor:
    """One synchronous gate-triple step; every read comes from `s`, writes go to a new vector."""
    if rule.is_laplacian:
        raise ConfigurationError("gca_step needs a gate triple; use laplacian_step")
    _check_states(net, s)
    fusion, attention, update = rule.parts()
    src, dst = net.torch_index
    d, theta = net.features.torch
    su, sv = s[src], s[dst]
    try:
        fused = _run(fusion, torch.stack([su, sv], dim=-1), mode)
        weights = _run(attention, torch.stack([su, sv, d, theta], dim=-1), mode)
        messages = torch.zeros_like(s).index_add_(0, src, l1_normalize(net, weights) * fused)
        nxt = _run(update, torch.stack([s, messages], dim=-1), mode)
    except NumericalError as exc:
        raise NumericalError(
            f"{exc} in iteration {iteration}", location=exc.location, iteration=iteration
        ) from exc
    if not torch.isfinite(nxt).all():
        _raise_non_finite(net, nxt, iteration)
    return nxt


@dataclass
class StateTrace:
    """States for t = 0..T stacked as a `(T + 1, n_nodes)` float64 tensor."""

    states: torch.Tensor

    @property
    def T(self) -> int:  # noqa: N802
        return int(self.states.shape[0]) - 1

    def __len__(self) -> int:
        return int(self.states.shape[0])

    def __getitem__(self, t: int) -> torch.Tensor:
        return self.states[t]

    def numpy(self) -> npt.NDArray[np.float64]:
        return self.states.detach().cpu().numpy()

    def header(self) -> list[str]:
        return ["node_id", *(f"t{t}" for t in range(len(self)))]

    def to_rows(self, net: SpatialNetwork) -> list[list[Any]]:
        values = self.numpy()
        return [[int(node_id), *values[:, i].tolist()] for i, node_id in enumerate(net.ids)]


def evolve(
    net: SpatialNetwork,
    rule: RuleSpec,
    T: int = 5,  # noqa: N803
    mode: Mode = "hard",
    initial: torch.Tensor | None = None,
) -> StateTrace:
    """Run `T` steps from the degree states. Soft mode keeps the autograd graph."""
    if T < 1:
        raise ConfigurationError("T must be at least 1")
    if mode not in ("soft", "hard"):
        raise ConfigurationError(f"unknown mode {mode!r}")
    active = rule if mode == "soft" else rule.hardened()
    state = init_states(net) if initial is None else initial
    _check_states(net, state)
    started = time.perf_counter()
    grad_context = nullcontext() if mode == "soft" and active.is_soft else torch.no_grad()
    with tracer.start_as_current_span("gcasim.engine.evolve") as span, grad_context:
        span.set_attribute("network", net.name)
        span.set_attribute("rule", "laplacian" if active.is_laplacian else "gate-triple")
        span.set_attribute("mode", mode)
        span.set_attribute("iterations", T)
        states = [state]
        for t in range(1, T + 1):
            if active.is_laplacian:
                state = laplacian_step(net, state)
                if not torch.isfinite(state).all():
                    _raise_non_finite(net, state, t)
            else:
                state = gca_step(net, state, active, mode=mode, iteration=t)
            states.append(state)
        STEP_COUNTER.add(T, attributes={"mode": mode})
    elapsed = time.perf_counter() - started
    EVOLVE_DURATION.record(elapsed, attributes={"mode": mode})
    logger.debug(
        "evolve_completed",
        extra={"network": net.name, "iterations": T, "mode": mode, "seconds": elapsed},
    )
    return StateTrace(torch.stack(states))


def iteration_quantiles(
    trace: StateTrace, qs: Sequence[float] = DEFAULT_QUANTILES
) -> npt.NDArray[np.float64]:
    """`(T + 1, len(qs))` array of per-iteration state quantiles (linear interpolation)."""
    if any(not 0.0 <= q <= 1.0 for q in qs):
        raise ConfigurationError("quantiles must lie in [0, 1]")
    values = trace.numpy()
    if values.shape[1] == 0:
        return np.full((values.shape[0], len(qs)), np.nan)
    return np.quantile(values, np.asarray(qs, dtype=np.float64), axis=1).T
