"""Training hyper-parameters and the train/validation group layout."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import pydantic
from pydantic import BaseModel, Field, field_validator, model_validator

from gcasim.artifacts import read_json_object
from gcasim.clustering import DEFAULT_TEMPERATURE
from gcasim.errors import ConfigurationError
from gcasim.network import SpatialNetwork
from gcasim.similarity import DEFAULT_BINS, LN2


class TrainConfig(BaseModel):
    """Loss weights, search budget and optimiser settings for one training run."""

    alpha: float = 1.0
    beta: float = 0.1
    gamma: float = 0.5
    delta: float = 0.1
    margin: float = 0.1 * LN2
    entropy_band: tuple[float, float] = (0.3, 0.95)
    learning_rate: float = 0.05
    clip: float = Field(default=10.0, gt=0.0)

    explore_budget: int = Field(default=200, ge=1)
    explore_threshold: float = 0.75
    epochs_per_group: int = Field(default=10, ge=1)
    fine_tune_cycles: int = Field(default=1, ge=1)
    target_silhouette: float = 0.9
    # Logit lead of the explored op when a candidate is turned back into a soft network.
    dominance: float = Field(default=3.0, gt=0.0)

    iterations: int = Field(default=5, ge=1)
    bins: int = Field(default=DEFAULT_BINS, ge=2)
    temperature: float = Field(default=DEFAULT_TEMPERATURE, gt=0.0)
    k_max: int | None = None

    seed: int = 0
    wiring_seed: int = 0

    @field_validator("alpha", "beta", "gamma", "delta", "margin", "learning_rate")
    @classmethod
    def _non_negative(cls, value: float) -> float:
        if value < 0:
            raise ValueError("must be non-negative")
        return value

    @field_validator("entropy_band")
    @classmethod
    def _band(cls, value: tuple[float, float]) -> tuple[float, float]:
        low, high = value
        if not 0.0 < low < high <= 1.0:
            raise ValueError("entropy band must satisfy 0 < h_min < h_max <= 1")
        return value

    @model_validator(mode="after")
    def _k_range(self) -> TrainConfig:
        if self.k_max is not None and self.k_max < 2:
            raise ValueError("k_max must be at least 2")
        return self

    @classmethod
    def build(cls, **values: Any) -> TrainConfig:
        """Validate `values`, reporting failures as `ConfigurationError`."""
        try:
            return cls(**values)
        except pydantic.ValidationError as exc:
            raise ConfigurationError(f"invalid training config: {exc}") from exc

    @classmethod
    def from_file(cls, path: str | Path) -> TrainConfig:
        path = Path(path)
        payload = read_json_object(path)
        payload.pop("meta", None)
        return cls.build(**payload)


@dataclass(frozen=True)
class GroupSet:
    """Training and validation groups of networks; names are unique across all groups."""

    train: Sequence[Sequence[SpatialNetwork]]
    validation: Sequence[Sequence[SpatialNetwork]]

    def __post_init__(self) -> None:
        if not self.train or not self.validation:
            raise ConfigurationError("need at least one training and one validation group")
        seen: set[str] = set()
        for group in (*self.train, *self.validation):
            if len(group) < 3:
                raise ConfigurationError("every group needs at least three networks")
            for net in group:
                if net.name in seen:
                    raise ConfigurationError(f"network {net.name!r} appears in two groups")
                seen.add(net.name)

    @property
    def sizes(self) -> dict[str, list[int]]:
        return {
            "train": [len(group) for group in self.train],
            "validation": [len(group) for group in self.validation],
        }
