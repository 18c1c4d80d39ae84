"""Rule discovery: random exploration, fine-tuning and the training objective."""

from __future__ import annotations

from .config import GroupSet, TrainConfig
from .loss import LossBreakdown, gate_entropy, loss_total, separation_margin, size_entropy_penalty
from .trainer import (
    Candidate,
    EpochRecord,
    ExploreResult,
    FineTuneResult,
    GroupMetrics,
    Trainer,
    TrainingRun,
    ValidationReport,
    fine_tune,
    random_explore,
    validate,
)

__all__ = [
    "Candidate",
    "EpochRecord",
    "ExploreResult",
    "FineTuneResult",
    "GroupMetrics",
    "GroupSet",
    "LossBreakdown",
    "TrainConfig",
    "Trainer",
    "TrainingRun",
    "ValidationReport",
    "fine_tune",
    "gate_entropy",
    "loss_total",
    "random_explore",
    "separation_margin",
    "size_entropy_penalty",
    "validate",
]
