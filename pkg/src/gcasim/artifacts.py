"""Deterministic CSV/JSON writers; every artifact carries tool version, config hash and seeds."""

from __future__ import annotations

import csv
import json
import logging
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from gcasim import __version__
from gcasim.errors import DataError, ParseError

logger = logging.getLogger(__name__)

TOOL_NAME = "gca-sim"


@dataclass(frozen=True)
class ArtifactMeta:
    config_hash: str = "-"
    seeds: Mapping[str, int] = field(default_factory=dict)
    tool: str = TOOL_NAME
    version: str = __version__

    def as_dict(self) -> dict[str, Any]:
        return {
            "tool": self.tool,
            "version": self.version,
            "config_hash": self.config_hash,
            "seeds": dict(sorted(self.seeds.items())),
        }

    def comment_line(self) -> str:
        seeds = ";".join(f"{key}={value}" for key, value in sorted(self.seeds.items()))
        return f"# {self.tool} {self.version} config={self.config_hash} seeds={seeds or '-'}"


def format_value(value: Any) -> str:
    """Stable textual form: shortest round-trip repr for floats."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    if hasattr(value, "item"):  # numpy / torch scalars
        return format_value(value.item())
    return str(value)


def _json_safe(value: Any) -> Any:
    if isinstance(value, Mapping):
        return {str(key): _json_safe(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(item) for item in value]
    if isinstance(value, float) and not math.isfinite(value):
        return format_value(value)
    if hasattr(value, "tolist"):
        return _json_safe(value.tolist())
    if isinstance(value, Path):
        return str(value)
    return value


def dumps_json(payload: Mapping[str, Any]) -> str:
    return json.dumps(_json_safe(payload), indent=2, sort_keys=True) + "\n"


def write_json(path: Path, payload: Mapping[str, Any], meta: ArtifactMeta | None = None) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    body = dict(payload)
    if meta is not None:
        body["meta"] = meta.as_dict()
    path.write_text(dumps_json(body), encoding="utf-8")
    logger.info("artifact_written", extra={"path": str(path), "kind": "json"})
    return path


def write_csv(
    path: Path,
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    meta: ArtifactMeta | None = None,
) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fp:
        if meta is not None:
            fp.write(meta.comment_line() + "\n")
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(cell) for cell in row])
    logger.info("artifact_written", extra={"path": str(path), "kind": "csv"})
    return path


def read_csv_rows(path: Path) -> tuple[list[str], list[tuple[int, list[str]]]]:
    """Return (header, [(line_number, row), ...]) skipping `#` comment and blank lines."""
    header: list[str] | None = None
    rows: list[tuple[int, list[str]]] = []
    try:
        with path.open("r", encoding="utf-8", newline="") as fp:
            for number, text in enumerate(fp, start=1):
                stripped = text.strip()
                if not stripped or stripped.startswith("#"):
                    continue
                row = next(csv.reader([text]))
                if header is None:
                    header = [cell.strip() for cell in row]
                else:
                    rows.append((number, [cell.strip() for cell in row]))
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot read CSV: {exc}", path=path) from exc
    return header or [], rows


def read_text(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot read file: {exc}", path=path) from exc


def read_json_object(path: Path) -> dict[str, Any]:
    """Load a JSON object; unreadable files raise DataError, malformed ones ParseError."""
    try:
        payload = json.loads(read_text(path))
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc.msg}", path=path, line=exc.lineno) from exc
    if not isinstance(payload, dict):
        raise ParseError(f"expected a JSON object, got {type(payload).__name__}", path=path)
    return payload
