"""Rank correlation between iterated node states and external node variables."""

from __future__ import annotations

import logging
import math
import warnings
from collections import defaultdict
from collections.abc import Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import numpy.typing as npt
from scipy.stats import spearmanr

from gcasim.artifacts import ArtifactMeta, read_csv_rows, write_csv
from gcasim.engine import RuleSpec, evolve
from gcasim.errors import ConfigurationError, ParseError
from gcasim.network import SpatialNetwork, mean_edge_length

logger = logging.getLogger(__name__)

DEFAULT_CORRELATION_ITERATIONS = 10
DEFAULT_MIN_COVERAGE = 0.5
MIN_MATCHED = 3


def spearman(x: npt.ArrayLike, y: npt.ArrayLike) -> float:
    """Spearman's rho with average ranks for ties; `nan` when either side is constant."""
    xa = np.asarray(x, dtype=np.float64).reshape(-1)
    ya = np.asarray(y, dtype=np.float64).reshape(-1)
    if xa.shape != ya.shape:
        raise ConfigurationError(f"vectors differ in length: {xa.shape[0]} vs {ya.shape[0]}")
    if xa.shape[0] < MIN_MATCHED:
        raise ConfigurationError(f"need at least {MIN_MATCHED} observations, got {xa.shape[0]}")
    if np.all(xa == xa[0]) or np.all(ya == ya[0]):
        logger.warning("spearman_undefined", extra={"reason": "zero rank variance"})
        return math.nan
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rho, _ = spearmanr(xa, ya)
    return float(rho)


@dataclass(frozen=True)
class ExternalVariable:
    """Per-node values keyed by node id."""

    name: str
    values: Mapping[int, float]

    def join(self, net: SpatialNetwork) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.float64]]:
        """Node positions with a value, and the values in the same order."""
        index = net.index_of
        matched = sorted(
            (index[node_id], value) for node_id, value in self.values.items() if node_id in index
        )
        positions = np.array([pos for pos, _ in matched], dtype=np.int64)
        values = np.array([value for _, value in matched], dtype=np.float64)
        return positions, values

    def coverage(self, net: SpatialNetwork) -> float:
        if net.n_nodes == 0:
            return 0.0
        index = net.index_of
        return sum(node_id in index for node_id in self.values) / net.n_nodes


def _parse_value(cell: str, path: Path, line: int) -> float:
    try:
        return float(cell)
    except ValueError as exc:
        raise ParseError(f"non-numeric value {cell!r}", path=path, line=line) from exc


def _parse_id(cell: str, path: Path, line: int) -> int:
    try:
        return int(cell)
    except ValueError as exc:
        raise ParseError(f"invalid node id {cell!r}", path=path, line=line) from exc


def load_external_variable(path: str | Path, name: str | None = None) -> ExternalVariable:
    """`id,value` CSV; a repeated id keeps its last value."""
    path = Path(path)
    header, rows = read_csv_rows(path)
    if header[:2] != ["id", "value"]:
        raise ParseError("expected header `id,value`", path=path, line=1)
    values: dict[int, float] = {}
    for line, row in rows:
        if len(row) < 2:
            raise ParseError("expected 2 fields", path=path, line=line)
        values[_parse_id(row[0], path, line)] = _parse_value(row[1], path, line)
    return ExternalVariable(name or path.stem, values)


def load_edge_variable(path: str | Path, name: str | None = None) -> ExternalVariable:
    """`u,v,value` CSV averaged onto nodes.

    Each edge value counts toward both endpoints `u` and `v`, not only the origin `u`; a node
    takes the mean over all edges incident to it.
    """
    path = Path(path)
    header, rows = read_csv_rows(path)
    if header[:3] != ["u", "v", "value"]:
        raise ParseError("expected header `u,v,value`", path=path, line=1)
    totals: dict[int, float] = defaultdict(float)
    counts: dict[int, int] = defaultdict(int)
    for line, row in rows:
        if len(row) < 3:
            raise ParseError("expected 3 fields", path=path, line=line)
        u, v = _parse_id(row[0], path, line), _parse_id(row[1], path, line)
        value = _parse_value(row[2], path, line)
        for node_id in {u, v}:
            totals[node_id] += value
            counts[node_id] += 1
    return ExternalVariable(
        name or path.stem, {node_id: totals[node_id] / counts[node_id] for node_id in totals}
    )


def edge_length_variable(net: SpatialNetwork) -> ExternalVariable:
    lengths = mean_edge_length(net)
    return ExternalVariable(
        "mean_edge_length",
        {int(node_id): float(length) for node_id, length in zip(net.ids, lengths, strict=True)},
    )


@dataclass(frozen=True)
class CorrelationRow:
    variable: str
    t: int
    rho: float
    n: int


@dataclass
class CorrelationTable:
    network: str
    rows: list[CorrelationRow] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)

    HEADER = ("variable", "t", "rho", "n")

    def to_csv(self, path: str | Path, meta: ArtifactMeta | None = None) -> Path:
        return write_csv(
            Path(path),
            list(self.HEADER),
            ([row.variable, row.t, row.rho, row.n] for row in self.rows),
            meta,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "network": self.network,
            "rows": [[row.variable, row.t, row.rho, row.n] for row in self.rows],
            "skipped": list(self.skipped),
        }

    def series(self, variable: str) -> list[float]:
        return [row.rho for row in self.rows if row.variable == variable]


def iterate_correlations(
    net: SpatialNetwork,
    rule: RuleSpec,
    variables: Sequence[ExternalVariable],
    T: int = DEFAULT_CORRELATION_ITERATIONS,  # noqa: N803
    min_coverage: float = DEFAULT_MIN_COVERAGE,
    threads: int | None = None,
) -> CorrelationTable:
    """rho(states[t], variable) for t = 0..T; poorly covered variables are skipped."""
    trace = evolve(net, rule, T).numpy()
    table = CorrelationTable(network=net.name)

    def correlate(variable: ExternalVariable) -> list[CorrelationRow] | None:
        coverage = variable.coverage(net)
        positions, values = variable.join(net)
        if coverage < min_coverage or positions.shape[0] < MIN_MATCHED:
            logger.warning(
                "variable_skipped",
                extra={"variable": variable.name, "coverage": coverage, "network": net.name},
            )
            return None
        n = int(positions.shape[0])
        return [
            CorrelationRow(variable.name, t, spearman(trace[t, positions], values), n)
            for t in range(trace.shape[0])
        ]

    if (threads or 1) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(correlate, variables))
    else:
        results = [correlate(variable) for variable in variables]
    for variable, rows in zip(variables, results, strict=True):
        if rows is None:
            table.skipped.append(variable.name)
        else:
            table.rows.extend(rows)
    logger.info(
        "correlations_computed",
        extra={"network": net.name, "variables": len(variables), "skipped": len(table.skipped)},
    )
    return table
