"""Pairwise trace distances and corpus distance matrices."""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Any, TypeVar

import numpy as np
import numpy.typing as npt
import torch

from gcasim.artifacts import ArtifactMeta, read_csv_rows, read_json_object, write_csv, write_json
from gcasim.engine import RuleSpec, StateTrace, evolve, rule_hash
from gcasim.engine.automaton import Mode
from gcasim.errors import ConfigurationError, DegenerateInputError, ParseError, ValidationError
from gcasim.network import SpatialNetwork
from gcasim.telemetry import get_meter, get_tracer

from .divergence import LN2, jsd
from .histogram import DEFAULT_BINS, soft_histogram

logger = logging.getLogger(__name__)
tracer = get_tracer("gcasim.similarity.distance")
meter = get_meter("gcasim.similarity.distance")

PAIR_COUNTER = meter.create_counter(
    "gcasim_similarity_pairs",
    unit="1",
    description="Network pairs compared",
)

DISTANCE_FORMAT_VERSION = "gca-dist/1"
DEFAULT_ITERATIONS = 5

T_Item = TypeVar("T_Item")
BOUNDED_METHODS = frozenset({"gca", "degreejsd"})


def trace_distance(
    trace_a: StateTrace,
    trace_b: StateTrace,
    bins: int = DEFAULT_BINS,
    include_t0: bool = False,
) -> torch.Tensor:
    """Mean JSD over iterations, each iteration binned on the pair's joint min-max range.

    The range is treated as a constant when differentiating.
    """
    if trace_a.T != trace_b.T:
        raise ConfigurationError(f"traces differ in length: T={trace_a.T} vs T={trace_b.T}")
    if trace_a.states.shape[1] == 0 or trace_b.states.shape[1] == 0:
        raise ValidationError("cannot compare a network without nodes")
    start = 0 if include_t0 else 1
    total = torch.zeros((), dtype=torch.float64)
    for t in range(start, trace_a.T + 1):
        xa, xb = trace_a[t], trace_b[t]
        lo = float(torch.minimum(xa.detach().min(), xb.detach().min()))
        hi = float(torch.maximum(xa.detach().max(), xb.detach().max()))
        total = total + jsd(soft_histogram(xa, lo, hi, bins), soft_histogram(xb, lo, hi, bins))
    return total / (trace_a.T + 1 - start)


def pair_distance(
    net_a: SpatialNetwork,
    net_b: SpatialNetwork,
    rule: RuleSpec,
    T: int = DEFAULT_ITERATIONS,  # noqa: N803
    bins: int = DEFAULT_BINS,
    include_t0: bool = False,
) -> float:
    """Distance between two networks under a (hardened) rule, in `[0, ln 2]`."""
    if net_a.n_nodes == 0 or net_b.n_nodes == 0:
        raise ValidationError("cannot compare a network without nodes")
    trace_a = evolve(net_a, rule, T)
    trace_b = evolve(net_b, rule, T)
    PAIR_COUNTER.add(1, attributes={"method": "gca"})
    return float(trace_distance(trace_a, trace_b, bins, include_t0))


@dataclass
class DistanceMatrix:
    """Symmetric matrix over a named corpus, tagged with the method that produced it."""

    names: list[str]
    values: npt.NDArray[np.float64]
    method: str = "gca"
    rule: str | None = None
    parameters: dict[str, Any] = field(default_factory=dict)
    manifest: list[dict[str, Any]] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        n = len(self.names)
        if self.values.shape != (n, n):
            raise ValidationError(f"matrix shape {self.values.shape} does not match {n} names")
        if not np.all(np.isfinite(self.values)):
            raise ValidationError("distance matrix contains non-finite entries")
        if not np.array_equal(self.values, self.values.T):
            raise ValidationError("distance matrix is not symmetric")
        if np.any(np.diag(self.values) != 0.0):
            raise ValidationError("distance matrix diagonal must be zero")
        if np.any(self.values < 0.0):
            raise ValidationError("distances must be non-negative")
        if self.method in BOUNDED_METHODS and np.any(self.values > LN2 + 1e-12):
            raise ValidationError("JSD-based distances must not exceed ln 2")

    @property
    def n(self) -> int:
        return len(self.names)

    def __getitem__(self, key: tuple[int, int]) -> float:
        return float(self.values[key])

    def condensed(self) -> npt.NDArray[np.float64]:
        """Upper triangle in row-major order (SciPy's condensed layout)."""
        rows, cols = np.triu_indices(self.n, k=1)
        return self.values[rows, cols]

    def payload(self) -> dict[str, Any]:
        return {
            "version": DISTANCE_FORMAT_VERSION,
            "method": self.method,
            "rule": self.rule,
            "names": list(self.names),
            "matrix": self.values.tolist(),
            "parameters": dict(self.parameters),
            "manifest": list(self.manifest),
        }

    def to_json(self, path: str | Path, meta: ArtifactMeta | None = None) -> Path:
        return write_json(Path(path), self.payload(), meta)

    def to_csv(self, path: str | Path, meta: ArtifactMeta | None = None) -> Path:
        rows = ([name, *self.values[i].tolist()] for i, name in enumerate(self.names))
        return write_csv(Path(path), ["name", *self.names], rows, meta)

    @classmethod
    def read_json(cls, path: str | Path) -> DistanceMatrix:
        path = Path(path)
        payload = read_json_object(path)
        if payload.get("version") != DISTANCE_FORMAT_VERSION:
            raise ParseError(f"unsupported matrix version {payload.get('version')!r}", path=path)
        try:
            return cls(
                names=[str(name) for name in payload["names"]],
                values=np.asarray(payload["matrix"], dtype=np.float64),
                method=str(payload.get("method", "gca")),
                rule=payload.get("rule"),
                parameters=dict(payload.get("parameters", {})),
                manifest=list(payload.get("manifest", [])),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ParseError(f"malformed distance matrix: {exc}", path=path) from exc

    @classmethod
    def read_csv(cls, path: str | Path, method: str = "gca") -> DistanceMatrix:
        path = Path(path)
        header, rows = read_csv_rows(path)
        if not header or header[0] != "name":
            raise ParseError("matrix CSV must start with a `name` column", path=path, line=1)
        names = header[1:]
        values = np.zeros((len(names), len(names)), dtype=np.float64)
        if len(rows) != len(names):
            raise ParseError(f"expected {len(names)} rows, got {len(rows)}", path=path)
        for i, (line, row) in enumerate(rows):
            if len(row) != len(names) + 1:
                raise ParseError(f"expected {len(names) + 1} fields", path=path, line=line)
            try:
                values[i] = [float(cell) for cell in row[1:]]
            except ValueError as exc:
                raise ParseError(f"non-numeric entry: {exc}", path=path, line=line) from exc
        return cls(names=names, values=values, method=method)

    @classmethod
    def from_tensor(
        cls, names: Sequence[str], matrix: torch.Tensor, **kwargs: Any
    ) -> DistanceMatrix:
        return cls(names=list(names), values=matrix.detach().cpu().numpy().copy(), **kwargs)


def corpus_manifest(corpus: Sequence[SpatialNetwork]) -> list[dict[str, Any]]:
    return [{"name": net.name, "nodes": net.n_nodes, "edges": net.n_edges} for net in corpus]


def compute_traces(
    corpus: Sequence[SpatialNetwork],
    rule: RuleSpec,
    T: int = DEFAULT_ITERATIONS,  # noqa: N803
    mode: Mode = "hard",
    threads: int | None = None,
) -> list[StateTrace]:
    if mode == "soft" or (threads or 1) <= 1:
        return [evolve(net, rule, T, mode=mode) for net in corpus]
    active = rule.hardened()
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda net: evolve(net, active, T), corpus))


def _symmetric(
    n: int, pairs: list[tuple[int, int]], values: list[float]
) -> npt.NDArray[np.float64]:
    matrix = np.zeros((n, n), dtype=np.float64)
    for (i, j), value in zip(pairs, values, strict=True):
        matrix[i, j] = matrix[j, i] = value
    return matrix


def distance_matrix(
    corpus: Sequence[SpatialNetwork],
    rule: RuleSpec,
    T: int = DEFAULT_ITERATIONS,  # noqa: N803
    bins: int = DEFAULT_BINS,
    include_t0: bool = False,
    threads: int | None = None,
) -> DistanceMatrix:
    """All-pairs distances; every network is evolved once and its trace reused."""
    if len(corpus) < 2:
        raise DegenerateInputError("a distance matrix needs at least two networks")
    for net in corpus:
        if net.n_nodes == 0:
            raise ValidationError(f"network {net.name!r} has no nodes")
    with tracer.start_as_current_span("gcasim.similarity.distance_matrix") as span:
        span.set_attribute("networks", len(corpus))
        span.set_attribute("iterations", T)
        span.set_attribute("bins", bins)
        traces = compute_traces(corpus, rule, T, threads=threads)
        pairs = list(combinations(range(len(corpus)), 2))

        def compute(pair: tuple[int, int]) -> float:
            with torch.no_grad():
                return float(trace_distance(traces[pair[0]], traces[pair[1]], bins, include_t0))

        if (threads or 1) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                values = list(pool.map(compute, pairs))
        else:
            values = [compute(pair) for pair in pairs]
        PAIR_COUNTER.add(len(pairs), attributes={"method": "gca"})

    logger.info(
        "distance_matrix_computed",
        extra={"networks": len(corpus), "pairs": len(pairs), "rule": rule.label},
    )
    return DistanceMatrix(
        names=[net.name for net in corpus],
        values=_symmetric(len(corpus), pairs, values),
        method="gca",
        rule="laplacian" if rule.is_laplacian else rule_hash(rule.hardened()),
        parameters={"T": T, "bins": bins, "include_t0": include_t0},
        manifest=corpus_manifest(corpus),
    )


def soft_distance_matrix(
    corpus: Sequence[SpatialNetwork],
    rule: RuleSpec,
    T: int = DEFAULT_ITERATIONS,  # noqa: N803
    bins: int = DEFAULT_BINS,
    include_t0: bool = False,
) -> torch.Tensor:
    """`(n, n)` tensor of distances under the soft rule, differentiable w.r.t. its logits."""
    if len(corpus) < 2:
        raise DegenerateInputError("a distance matrix needs at least two networks")
    with tracer.start_as_current_span("gcasim.similarity.soft_distance_matrix") as span:
        span.set_attribute("networks", len(corpus))
        traces = compute_traces(corpus, rule, T, mode="soft")
        pairs = list(combinations(range(len(corpus)), 2))
        values = torch.stack(
            [trace_distance(traces[i], traces[j], bins, include_t0) for i, j in pairs]
        )
        rows = torch.tensor([i for i, _ in pairs], dtype=torch.long)
        cols = torch.tensor([j for _, j in pairs], dtype=torch.long)
        upper = torch.zeros((len(corpus), len(corpus)), dtype=torch.float64).index_put(
            (rows, cols), values
        )
    return upper + upper.T


def pairwise_matrix(
    names: Sequence[str],
    items: Sequence[T_Item],
    metric: Callable[[T_Item, T_Item], float],
    method: str,
    threads: int | None = None,
    parameters: dict[str, Any] | None = None,
    manifest: list[dict[str, Any]] | None = None,
) -> DistanceMatrix:
    """Matrix of `metric` over all unordered pairs of precomputed per-network items."""
    if len(items) < 2:
        raise DegenerateInputError("a distance matrix needs at least two networks")
    pairs = list(combinations(range(len(items)), 2))

    def compute(pair: tuple[int, int]) -> float:
        return metric(items[pair[0]], items[pair[1]])

    if (threads or 1) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(compute, pairs))
    else:
        values = [compute(pair) for pair in pairs]
    PAIR_COUNTER.add(len(pairs), attributes={"method": method})
    logger.info(
        "distance_matrix_computed",
        extra={"networks": len(items), "pairs": len(pairs), "method": method},
    )
    return DistanceMatrix(
        names=list(names),
        values=_symmetric(len(items), pairs, values),
        method=method,
        parameters=parameters or {},
        manifest=manifest or [],
    )
