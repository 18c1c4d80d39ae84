"""Environment-driven runtime settings and the per-command run record."""

from __future__ import annotations

import hashlib
import json
from functools import lru_cache
from pathlib import Path
from typing import Any

from pydantic import BaseModel, Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class RuntimeSettings(BaseSettings):
    """Defaults that can be overridden with `GCASIM_*` environment variables."""

    model_config = SettingsConfigDict(env_prefix="GCASIM_")

    output_dir: Path = Path("gca_artifacts")
    threads: int | None = None
    default_bins: int = 64
    default_iterations: int = 5


@lru_cache(maxsize=1)
def load_settings() -> RuntimeSettings:
    return RuntimeSettings()


class RunConfig(BaseModel):
    """Resolved parameters of one CLI invocation; hashed into every artifact."""

    command: str
    parameters: dict[str, Any] = Field(default_factory=dict)
    inputs: list[str] = Field(default_factory=list)
    rule: str | None = None
    seeds: dict[str, int] = Field(default_factory=dict)
    output_dir: str = "."

    def canonical_json(self) -> str:
        # output_dir is excluded so relocating a run does not change its hash.
        payload = self.model_dump(exclude={"output_dir"})
        return json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()[:16]
