"""Propagation rules: the fixed Laplacian rule or a (fusion, attention, update) gate triple."""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any

from gcasim.artifacts import ArtifactMeta, read_json_object, write_json
from gcasim.errors import ConfigurationError
from gcasim.gates import Circuit, GateNetwork, harden, init_gate_network, network_from_dict
from gcasim.gates.circuit import LogitInit

logger = logging.getLogger(__name__)

RULE_FORMAT_VERSION = "gca-rule/1"

FUSION_ARITY = 2
ATTENTION_ARITY = 4
UPDATE_ARITY = 2

DEFAULT_FUSION_LAYERS = (4, 2, 1)
DEFAULT_ATTENTION_LAYERS = (8, 4, 1)
DEFAULT_UPDATE_LAYERS = (16, 8, 4, 1)


class RuleKind(Enum):
    LAPLACIAN = "laplacian"
    GATE_TRIPLE = "gate-triple"


@dataclass(frozen=True)
class RuleSpec:
    """A propagation rule. Gate triples read (s_u, s_v), (s_u, s_v, d, theta) and (s_u, m_u)."""

    kind: RuleKind
    fusion: Circuit | None = None
    attention: Circuit | None = None
    update: Circuit | None = None

    def __post_init__(self) -> None:
        if self.kind is RuleKind.LAPLACIAN:
            if any(part is not None for part in (self.fusion, self.attention, self.update)):
                raise ConfigurationError("the Laplacian rule takes no gate networks")
            return
        expected = (
            ("fusion", self.fusion, FUSION_ARITY),
            ("attention", self.attention, ATTENTION_ARITY),
            ("update", self.update, UPDATE_ARITY),
        )
        for role, circuit, arity in expected:
            if circuit is None:
                raise ConfigurationError(f"gate triple is missing its {role} network")
            if circuit.input_arity != arity:
                raise ConfigurationError(
                    f"{role} network must take {arity} inputs, got {circuit.input_arity}"
                )

    @classmethod
    def laplacian(cls) -> RuleSpec:
        return cls(RuleKind.LAPLACIAN)

    @classmethod
    def gate_triple(cls, fusion: Circuit, attention: Circuit, update: Circuit) -> RuleSpec:
        return cls(RuleKind.GATE_TRIPLE, fusion, attention, update)

    @property
    def is_laplacian(self) -> bool:
        return self.kind is RuleKind.LAPLACIAN

    @property
    def is_soft(self) -> bool:
        return any(isinstance(part, GateNetwork) for part in self.parts())

    def parts(self) -> tuple[Circuit, ...]:
        if self.is_laplacian:
            return ()
        assert self.fusion is not None and self.attention is not None and self.update is not None
        return (self.fusion, self.attention, self.update)

    def hardened(self) -> RuleSpec:
        """Argmax of every soft part; hard parts are kept as they are."""
        if not self.is_soft:
            return self
        fusion, attention, update = (
            harden(part) if isinstance(part, GateNetwork) else part for part in self.parts()
        )
        return RuleSpec.gate_triple(fusion, attention, update)

    def parameters(self) -> list[Any]:
        params: list[Any] = []
        for part in self.parts():
            if isinstance(part, GateNetwork):
                params.extend(part.parameters())
        return params

    def to_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {"version": RULE_FORMAT_VERSION, "kind": self.kind.value}
        if not self.is_laplacian:
            for role, part in zip(("fusion", "attention", "update"), self.parts(), strict=True):
                payload[role] = part.to_dict()
        return payload

    @property
    def label(self) -> str:
        return "laplacian" if self.is_laplacian else f"gate-triple:{rule_hash(self)[:12]}"


def rule_from_dict(payload: dict[str, Any]) -> RuleSpec:
    version = payload.get("version")
    if version != RULE_FORMAT_VERSION:
        raise ConfigurationError(f"unsupported rule version {version!r}")
    try:
        kind = RuleKind(payload.get("kind"))
    except ValueError as exc:
        raise ConfigurationError(f"unknown rule kind {payload.get('kind')!r}") from exc
    if kind is RuleKind.LAPLACIAN:
        return RuleSpec.laplacian()
    try:
        parts = [network_from_dict(payload[role]) for role in ("fusion", "attention", "update")]
    except KeyError as exc:
        raise ConfigurationError(f"gate triple is missing {exc.args[0]!r}") from exc
    return RuleSpec.gate_triple(*parts)


def rule_hash(rule: RuleSpec) -> str:
    """SHA-256 of the canonical rule JSON."""
    canonical = json.dumps(rule.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def save_rule(rule: RuleSpec, path: str | Path, meta: ArtifactMeta | None = None) -> Path:
    return write_json(Path(path), rule.to_dict(), meta)


def load_rule(source: str | Path) -> RuleSpec:
    """`laplacian` or a path to a `gca-rule/1` JSON file."""
    if str(source) == "laplacian":
        return RuleSpec.laplacian()
    path = Path(source)
    if not path.exists():
        raise ConfigurationError(f"rule file not found: {path}")
    payload = read_json_object(path)
    payload.pop("meta", None)
    rule = rule_from_dict(payload)
    logger.info("rule_loaded", extra={"path": str(path), "rule": rule.label})
    return rule


def default_gate_triple(
    wiring_seed: int = 0,
    logit_init: LogitInit = "uniform-zero",
    fusion_layers: tuple[int, ...] = DEFAULT_FUSION_LAYERS,
    attention_layers: tuple[int, ...] = DEFAULT_ATTENTION_LAYERS,
    update_layers: tuple[int, ...] = DEFAULT_UPDATE_LAYERS,
) -> RuleSpec:
    """Soft triple with the default shapes; the three parts use seeds `wiring_seed + 0..2`."""
    return RuleSpec.gate_triple(
        init_gate_network(FUSION_ARITY, fusion_layers, wiring_seed, logit_init),
        init_gate_network(ATTENTION_ARITY, attention_layers, wiring_seed + 1, logit_init),
        init_gate_network(UPDATE_ARITY, update_layers, wiring_seed + 2, logit_init),
    )
