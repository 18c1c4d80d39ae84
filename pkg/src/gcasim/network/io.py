"""Reading and writing spatial networks (edge-list CSV, GraphML subset, `gca-net/1` JSON)."""

from __future__ import annotations

import logging
import xml.etree.ElementTree as ET
from enum import Enum
from pathlib import Path
from typing import Any

from gcasim.artifacts import ArtifactMeta, read_csv_rows, read_json_object, write_csv, write_json
from gcasim.errors import DataError, ParseError, ValidationError
from gcasim.telemetry import get_tracer

from .model import SpatialNetwork, SpatialNode

logger = logging.getLogger(__name__)
tracer = get_tracer("gcasim.network.io")

NETWORK_FORMAT_VERSION = "gca-net/1"


class NetworkFormat(Enum):
    EDGE_LIST_CSV = "edge-list-csv"
    GRAPHML = "graphml"
    JSON = "json"

    @classmethod
    def detect(cls, path: Path) -> NetworkFormat:
        if path.is_dir() or path.name.endswith("nodes.csv"):
            return cls.EDGE_LIST_CSV
        if path.suffix.lower() in {".graphml", ".xml"}:
            return cls.GRAPHML
        if path.suffix.lower() == ".json":
            return cls.JSON
        raise ParseError("cannot infer network format", path=path)


def load_network(
    path: str | Path, fmt: NetworkFormat | str | None = None, name: str | None = None
) -> SpatialNetwork:
    """Load and clean a network; node order is ascending by id."""
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"network file not found: {path}")
    resolved = NetworkFormat(fmt) if fmt is not None else NetworkFormat.detect(path)
    with tracer.start_as_current_span("gcasim.network.load_network") as span:
        span.set_attribute("path", str(path))
        span.set_attribute("format", resolved.value)
        if resolved is NetworkFormat.EDGE_LIST_CSV:
            net = _load_edge_list(path, name)
        elif resolved is NetworkFormat.GRAPHML:
            net = _load_graphml(path, name)
        else:
            net = _load_json(path, name)
        span.set_attribute("nodes", net.n_nodes)
        span.set_attribute("edges", net.n_edges)
    logger.info(
        "network_loaded",
        extra={"network": net.name, "nodes": net.n_nodes, "edges": net.n_edges},
    )
    return net


def _require_columns(header: list[str], columns: tuple[str, ...], path: Path) -> list[int]:
    missing = [column for column in columns if column not in header]
    if missing:
        raise ParseError(f"missing column(s) {', '.join(missing)}", path=path, line=1)
    return [header.index(column) for column in columns]


def _parse_int(text: str, path: Path, line: int | None, what: str) -> int:
    try:
        return int(text)
    except ValueError as exc:
        raise ParseError(f"{what} {text!r} is not an integer", path=path, line=line) from exc


def _parse_float(text: str, path: Path, line: int, what: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise ParseError(f"{what} {text!r} is not a number", path=path, line=line) from exc


def _make_node(node_id: int, lat: float, lon: float, path: Path, line: int | None) -> SpatialNode:
    try:
        return SpatialNode(node_id, lat, lon)
    except ValidationError as exc:
        raise ParseError(str(exc), path=path, line=line) from exc


def _load_edge_list(path: Path, name: str | None) -> SpatialNetwork:
    if path.is_dir():
        nodes_path, edges_path = path / "nodes.csv", path / "edges.csv"
        default_name = path.name
    else:
        nodes_path = path
        edges_path = path.with_name(path.name.replace("nodes.csv", "edges.csv"))
        default_name = path.name.replace("nodes.csv", "").rstrip("._-") or path.parent.name
    for required in (nodes_path, edges_path):
        if not required.exists():
            raise ValidationError(f"edge-list network requires {required}")

    header, rows = read_csv_rows(nodes_path)
    id_col, lat_col, lon_col = _require_columns(header, ("id", "lat", "lon"), nodes_path)
    nodes: list[SpatialNode] = []
    for line, row in rows:
        if len(row) < len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", nodes_path, line)
        node_id = _parse_int(row[id_col], nodes_path, line, "node id")
        lat = _parse_float(row[lat_col], nodes_path, line, "lat")
        lon = _parse_float(row[lon_col], nodes_path, line, "lon")
        nodes.append(_make_node(node_id, lat, lon, nodes_path, line))

    header, rows = read_csv_rows(edges_path)
    u_col, v_col = _require_columns(header, ("u", "v"), edges_path)
    edges: list[tuple[int, int]] = []
    known = {node.id for node in nodes}
    for line, row in rows:
        if len(row) < len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", edges_path, line)
        u = _parse_int(row[u_col], edges_path, line, "edge endpoint")
        v = _parse_int(row[v_col], edges_path, line, "edge endpoint")
        for endpoint in (u, v):
            if endpoint not in known:
                raise ValidationError(
                    f"{edges_path}:{line}: edge ({u}, {v}) references unknown node {endpoint}"
                )
        edges.append((u, v))
    return SpatialNetwork.from_records(nodes, edges, name=name or default_name)


def _load_graphml(path: Path, name: str | None) -> SpatialNetwork:
    import networkx as nx

    try:
        graph = nx.read_graphml(path)
    except ET.ParseError as exc:
        line = exc.position[0] if getattr(exc, "position", None) else None
        raise ParseError(f"malformed GraphML: {exc}", path=path, line=line) from exc
    except OSError as exc:
        raise DataError(f"cannot read GraphML: {exc}", path=path) from exc

    nodes: list[SpatialNode] = []
    relabel: dict[Any, int] = {}
    for key, data in graph.nodes(data=True):
        # GraphML writers commonly emit ids as "n12".
        text = str(key)
        node_id = _parse_int(text[1:] if text.startswith("n") else text, path, None, "node id")
        lat = data.get("lat", data.get("y"))
        lon = data.get("lon", data.get("x"))
        if lat is None or lon is None:
            raise ParseError(f"node {key} lacks lat/lon data", path=path)
        relabel[key] = node_id
        nodes.append(_make_node(node_id, float(lat), float(lon), path, None))
    edges = [(relabel[u], relabel[v]) for u, v in graph.edges()]
    return SpatialNetwork.from_records(nodes, edges, name=name or path.stem)


def network_payload(net: SpatialNetwork) -> dict[str, Any]:
    features = net.features
    ids = net.ids
    return {
        "version": NETWORK_FORMAT_VERSION,
        "name": net.name,
        "nodes": [
            [int(i), float(la), float(lo)]
            for i, la, lo in zip(ids, net.lat, net.lon, strict=True)
        ],
        "edges": [[u, v] for u, v in net.edge_ids()],
        "features": [
            [int(ids[u]), int(ids[v]), float(d), float(t)]
            for u, v, d, t in zip(net.src, net.dst, features.d, features.theta, strict=True)
        ],
    }


def save_network(net: SpatialNetwork, path: str | Path, meta: ArtifactMeta | None = None) -> Path:
    """Serialise to `gca-net/1` JSON; features are included for downstream consumers."""
    return write_json(Path(path), network_payload(net), meta)


def save_edge_list(
    net: SpatialNetwork, directory: str | Path, meta: ArtifactMeta | None = None
) -> Path:
    directory = Path(directory)
    write_csv(
        directory / "nodes.csv",
        ["id", "lat", "lon"],
        ([node.id, node.lat, node.lon] for node in net.nodes),
        meta,
    )
    write_csv(directory / "edges.csv", ["u", "v"], net.edge_ids(), meta)
    return directory


def _load_json(path: Path, name: str | None) -> SpatialNetwork:
    payload = read_json_object(path)
    version = payload.get("version")
    if version != NETWORK_FORMAT_VERSION:
        raise ParseError(f"unsupported network version {version!r}", path=path)
    try:
        nodes = [
            _make_node(int(i), float(la), float(lo), path, None)
            for i, la, lo in payload["nodes"]
        ]
        edges = [(int(u), int(v)) for u, v in payload["edges"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed network record: {exc}", path=path) from exc
    return SpatialNetwork.from_records(nodes, edges, name=name or payload.get("name") or path.stem)
