"""Random exploration and gradient fine-tuning of gate-triple rules."""

from __future__ import annotations

import copy
import logging
import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import product
from pathlib import Path
from typing import Any

import numpy as np
import torch
from torch import nn

from gcasim.artifacts import ArtifactMeta, write_csv, write_json
from gcasim.clustering import select_k
from gcasim.engine import RuleSpec, default_gate_triple, save_rule
from gcasim.errors import ConfigurationError, NumericalError
from gcasim.gates import GateNetwork, HardGateNetwork, sample_dominant
from gcasim.network import SpatialNetwork
from gcasim.similarity import distance_matrix, soft_distance_matrix
from gcasim.telemetry import get_meter, get_tracer

from .config import GroupSet, TrainConfig
from .loss import loss_total

logger = logging.getLogger(__name__)

Group = Sequence[SpatialNetwork]

FAILED_SILHOUETTE = math.nan


def _improves(score: float, best: float) -> bool:
    """NaN marks a failed evaluation: it never improves, and anything finite beats it."""
    if math.isnan(score):
        return False
    return math.isnan(best) or score > best


@dataclass(frozen=True)
class GroupMetrics:
    k: int
    silhouette: float
    soft_silhouette: float
    ch: float
    db: float
    degenerate: bool


@dataclass(frozen=True)
class ValidationReport:
    groups: list[GroupMetrics]

    def _mean(self, key: str) -> float:
        return float(np.mean([getattr(group, key) for group in self.groups]))

    @property
    def silhouette(self) -> float:
        return self._mean("silhouette")

    @property
    def soft_silhouette(self) -> float:
        return self._mean("soft_silhouette")

    @property
    def ch(self) -> float:
        return self._mean("ch")

    @property
    def db(self) -> float:
        return self._mean("db")

    def to_dict(self) -> dict[str, Any]:
        return {
            "silhouette": self.silhouette,
            "soft_silhouette": self.soft_silhouette,
            "ch": self.ch,
            "db": self.db,
            "groups": [asdict(group) for group in self.groups],
        }


@dataclass(frozen=True)
class Candidate:
    index: int
    seeds: tuple[int, int, int]
    rule: RuleSpec
    silhouette: float
    db: float
    failed: bool = False


@dataclass
class ExploreResult:
    """Candidates ranked by mean validation Silhouette (ties keep sampling order)."""

    ranked: list[Candidate]
    promoted: bool

    @property
    def best(self) -> Candidate:
        return self.ranked[0]

    def distribution(self) -> list[float]:
        """Silhouette of every successfully evaluated candidate in sampling order."""
        ordered = sorted(self.ranked, key=lambda c: c.index)
        return [c.silhouette for c in ordered if not c.failed]

    @property
    def failed(self) -> int:
        return sum(c.failed for c in self.ranked)


@dataclass(frozen=True)
class EpochRecord:
    cycle: int
    group: int
    epoch: int
    k: int
    loss: float
    loss_sil: float
    loss_hard: float
    loss_margin: float
    loss_ent: float
    val_silhouette: float
    val_db: float

    HEADER = (
        "cycle",
        "group",
        "epoch",
        "k",
        "loss",
        "loss_sil",
        "loss_hard",
        "loss_margin",
        "loss_ent",
        "val_silhouette",
        "val_db",
    )

    def row(self) -> list[Any]:
        return [getattr(self, name) for name in self.HEADER]


@dataclass
class FineTuneResult:
    rule: RuleSpec
    soft_rule: RuleSpec
    initial_silhouette: float
    best_silhouette: float
    history: list[EpochRecord] = field(default_factory=list)
    stopped_early: bool = False
    aborted: bool = False


@dataclass
class TrainingRun:
    explore: ExploreResult
    fine_tune: FineTuneResult
    laplacian_silhouette: float | None
    output_dir: Path | None = None


def _soften(rule: RuleSpec, dominance: float) -> RuleSpec:
    """Trainable copy of `rule`: hard parts become soft networks led by their current op."""
    if rule.is_laplacian:
        raise ConfigurationError("the Laplacian rule has no trainable parameters")
    parts = []
    for part in rule.parts():
        if isinstance(part, HardGateNetwork):
            parts.append(GateNetwork.from_hard(part, dominance))
        else:
            parts.append(copy.deepcopy(part))
    return RuleSpec.gate_triple(*parts)


class Trainer:
    """Holds the config, run directory, telemetry instruments and history of one run."""

    def __init__(
        self,
        config: TrainConfig,
        output_dir: str | Path | None = None,
        threads: int | None = None,
        meta: ArtifactMeta | None = None,
    ) -> None:
        self.config = config
        self.threads = threads
        self.meta = meta
        self.output_dir = Path(output_dir) if output_dir is not None else None
        if self.output_dir is not None:
            self.output_dir.mkdir(parents=True, exist_ok=True)

        self.tracer = get_tracer("gcasim.training.trainer")
        self.meter = get_meter("gcasim.training.trainer")
        self.candidate_silhouette_hist = self.meter.create_histogram(
            "gcasim_training_candidate_silhouette",
            unit="1",
            description="Mean validation Silhouette of explored candidates",
        )
        self.loss_hist = self.meter.create_histogram(
            "gcasim_training_loss",
            unit="1",
            description="Total training loss per epoch",
        )
        self.validation_hist = self.meter.create_histogram(
            "gcasim_training_validation_silhouette",
            unit="1",
            description="Mean validation Silhouette after each epoch",
        )
        self.epochs: list[EpochRecord] = []
        self.candidates: list[Candidate] = []
        logger.info(
            "trainer_initialised",
            extra={
                "explore_budget": config.explore_budget,
                "epochs_per_group": config.epochs_per_group,
                "learning_rate": config.learning_rate,
                "seed": config.seed,
                "output_dir": str(self.output_dir) if self.output_dir else None,
            },
        )

    # ------------------------------------------------------------------ evaluation

    def _k_max(self, n: int) -> int | None:
        return None if self.config.k_max is None else min(self.config.k_max, n - 1)

    def validate(self, rule: RuleSpec, groups: Sequence[Group]) -> ValidationReport:
        """Distance matrix, cluster-count selection and indices per group, under the hard rule."""
        if not groups:
            raise ConfigurationError("validation needs at least one group")
        cfg = self.config
        with self.tracer.start_as_current_span("gcasim.training.validate") as span:
            span.set_attribute("groups", len(groups))
            metrics = []
            for group in groups:
                matrix = distance_matrix(
                    group, rule.hardened(), cfg.iterations, cfg.bins, threads=self.threads
                )
                result = select_k(
                    matrix, k_max=self._k_max(matrix.n), temperature=cfg.temperature
                )
                metrics.append(
                    GroupMetrics(
                        k=result.k,
                        silhouette=result.silhouette,
                        soft_silhouette=result.soft_silhouette,
                        ch=result.ch,
                        db=result.db,
                        degenerate=result.degenerate,
                    )
                )
            report = ValidationReport(metrics)
            span.set_attribute("silhouette", report.silhouette)
        return report

    def _score(self, rule: RuleSpec, groups: Sequence[Group]) -> ValidationReport | None:
        try:
            return self.validate(rule, groups)
        except NumericalError as exc:
            logger.warning("rule_evaluation_failed", extra={"error": str(exc)})
            return None

    # ------------------------------------------------------------------ exploration

    def random_explore(self, groups: GroupSet) -> ExploreResult:
        """Score `explore_budget` uniformly sampled hard triples on the validation groups."""
        cfg = self.config
        base = default_gate_triple(cfg.wiring_seed)
        rng = np.random.default_rng(cfg.seed)
        seeds = rng.integers(0, 2**31 - 1, size=(cfg.explore_budget, 3))

        def evaluate(index: int) -> Candidate:
            triple = tuple(int(s) for s in seeds[index])
            parts = [
                sample_dominant(part, seed)
                for part, seed in zip(base.parts(), triple, strict=True)
            ]
            rule = RuleSpec.gate_triple(*parts)
            report = self._score(rule, groups.validation)
            if report is None:
                return Candidate(index, triple, rule, FAILED_SILHOUETTE, math.inf, failed=True)
            return Candidate(index, triple, rule, report.silhouette, report.db)

        with self.tracer.start_as_current_span("gcasim.training.random_explore") as span:
            span.set_attribute("budget", cfg.explore_budget)
            if (self.threads or 1) > 1:
                with ThreadPoolExecutor(max_workers=self.threads) as pool:
                    candidates = list(pool.map(evaluate, range(cfg.explore_budget)))
            else:
                candidates = [evaluate(index) for index in range(cfg.explore_budget)]
            for candidate in candidates:
                if not candidate.failed:
                    self.candidate_silhouette_hist.record(candidate.silhouette)
            # Failed candidates sink to the bottom in sampling order.
            ranked = sorted(
                candidates,
                key=lambda c: (c.failed, 0.0 if c.failed else -c.silhouette, c.index),
            )
            promoted = not ranked[0].failed and ranked[0].silhouette >= cfg.explore_threshold
            span.set_attribute("best_silhouette", ranked[0].silhouette)
            span.set_attribute("promoted", promoted)

        self.candidates = ranked
        logger.info(
            "random_explore_completed",
            extra={
                "budget": cfg.explore_budget,
                "best_silhouette": ranked[0].silhouette,
                "failed": sum(c.failed for c in ranked),
                "promoted": promoted,
            },
        )
        if not promoted:
            logger.warning(
                "explore_not_promoted",
                extra={"best_silhouette": ranked[0].silhouette, "threshold": cfg.explore_threshold},
            )
        return ExploreResult(ranked=ranked, promoted=promoted)

    # ------------------------------------------------------------------ fine-tuning

    def train_step(
        self, rule: RuleSpec, group: Group, optimizer: torch.optim.Optimizer
    ) -> tuple[int, dict[str, float]]:
        """One gradient step on one group; returns the cut's k and the loss breakdown."""
        cfg = self.config
        soft_matrix = soft_distance_matrix(group, rule, cfg.iterations, cfg.bins)
        clusters = select_k(
            soft_matrix.detach().numpy(),
            k_max=self._k_max(len(group)),
            temperature=cfg.temperature,
        )
        breakdown = loss_total(soft_matrix, clusters.labels, rule, cfg)
        if not torch.isfinite(breakdown.total):
            raise NumericalError("non-finite training loss", location="loss")
        optimizer.zero_grad()
        breakdown.total.backward()
        nn.utils.clip_grad_value_(rule.parameters(), cfg.clip)
        optimizer.step()
        return clusters.k, breakdown.as_dict()

    def fine_tune(self, rule: RuleSpec, groups: GroupSet) -> FineTuneResult:
        """Cycle the training groups; keep the hardened rule with the best validation Silhouette.

        The returned rule never scores below the starting rule on the validation groups.
        """
        cfg = self.config
        soft_rule = _soften(rule, cfg.dominance)
        initial = self._score(soft_rule.hardened(), groups.validation)
        best_rule = soft_rule.hardened()
        best = initial.silhouette if initial is not None else FAILED_SILHOUETTE
        result = FineTuneResult(
            rule=best_rule, soft_rule=soft_rule, initial_silhouette=best, best_silhouette=best
        )
        optimizer = torch.optim.SGD(soft_rule.parameters(), lr=cfg.learning_rate)

        schedule = product(
            range(cfg.fine_tune_cycles), enumerate(groups.train), range(cfg.epochs_per_group)
        )
        with self.tracer.start_as_current_span("gcasim.training.fine_tune") as span:
            span.set_attribute("train_groups", len(groups.train))
            span.set_attribute("epochs_per_group", cfg.epochs_per_group)
            for cycle, (group_index, group), epoch in schedule:
                try:
                    k, losses = self.train_step(soft_rule, group, optimizer)
                except NumericalError as exc:
                    result.aborted = True
                    logger.error(
                        "fine_tune_aborted",
                        extra={"error": str(exc), "epochs_completed": len(result.history)},
                    )
                    break
                hardened = soft_rule.hardened()
                report = self._score(hardened, groups.validation)
                record = EpochRecord(
                    cycle,
                    group_index,
                    epoch,
                    k,
                    **losses,
                    val_silhouette=report.silhouette if report else FAILED_SILHOUETTE,
                    val_db=report.db if report else math.inf,
                )
                result.history.append(record)
                self.loss_hist.record(losses["loss"])
                if report is not None:
                    self.validation_hist.record(record.val_silhouette)
                logger.info("fine_tune_epoch", extra=asdict(record))
                if _improves(record.val_silhouette, result.best_silhouette):
                    result.best_silhouette = record.val_silhouette
                    result.rule = hardened
                if record.val_silhouette >= cfg.target_silhouette:
                    result.stopped_early = True
                    break
            span.set_attribute("epochs", len(result.history))
            span.set_attribute("best_silhouette", result.best_silhouette)

        self.epochs = result.history
        logger.info(
            "fine_tune_completed",
            extra={
                "epochs": len(result.history),
                "initial_silhouette": result.initial_silhouette,
                "best_silhouette": result.best_silhouette,
                "stopped_early": result.stopped_early,
                "aborted": result.aborted,
            },
        )
        return result

    # ------------------------------------------------------------------ full run

    def run(self, groups: GroupSet) -> TrainingRun:
        """Explore, fine-tune the top candidate and write the run directory."""
        explore = self.random_explore(groups)
        tuned = self.fine_tune(explore.best.rule, groups)
        baseline = self._score(RuleSpec.laplacian(), groups.validation)
        run = TrainingRun(
            explore=explore,
            fine_tune=tuned,
            laplacian_silhouette=baseline.silhouette if baseline else None,
            output_dir=self.output_dir,
        )
        if self.output_dir is not None:
            self._save(run, groups)
        return run

    def _save(self, run: TrainingRun, groups: GroupSet) -> None:
        assert self.output_dir is not None
        out = self.output_dir
        write_json(
            out / "config.json",
            {"config": self.config.model_dump(), "groups": groups.sizes},
            self.meta,
        )
        write_csv(
            out / "candidates.csv",
            [
                "rank",
                "index",
                "seed_fusion",
                "seed_attention",
                "seed_update",
                "silhouette",
                "db",
                "failed",
            ],
            (
                [rank, c.index, *c.seeds, *_scores(c), int(c.failed)]
                for rank, c in enumerate(run.explore.ranked, start=1)
            ),
            self.meta,
        )
        write_csv(
            out / "epochs.csv",
            list(EpochRecord.HEADER),
            (record.row() for record in run.fine_tune.history),
            self.meta,
        )
        save_rule(run.fine_tune.rule, out / "best_rule.json", self.meta)
        write_json(
            out / "summary.json",
            {
                "promoted": run.explore.promoted,
                "explore_best_silhouette": _or_null(run.explore.best.silhouette),
                "explore_failed": run.explore.failed,
                "initial_silhouette": _or_null(run.fine_tune.initial_silhouette),
                "best_silhouette": _or_null(run.fine_tune.best_silhouette),
                "laplacian_silhouette": run.laplacian_silhouette,
                "epochs": len(run.fine_tune.history),
                "stopped_early": run.fine_tune.stopped_early,
                "aborted": run.fine_tune.aborted,
            },
            self.meta,
        )


def _scores(candidate: Candidate) -> tuple[Any, Any]:
    if candidate.failed:
        return "", ""
    return candidate.silhouette, candidate.db


def _or_null(value: float) -> float | None:
    return None if math.isnan(value) else value


def validate(
    rule: RuleSpec,
    groups: Sequence[Group],
    cfg: TrainConfig | None = None,
    threads: int | None = None,
) -> ValidationReport:
    return Trainer(cfg or TrainConfig(), threads=threads).validate(rule, groups)


def random_explore(
    groups: GroupSet, cfg: TrainConfig, threads: int | None = None
) -> ExploreResult:
    return Trainer(cfg, threads=threads).random_explore(groups)


def fine_tune(
    rule: RuleSpec, groups: GroupSet, cfg: TrainConfig, threads: int | None = None
) -> FineTuneResult:
    return Trainer(cfg, threads=threads).fine_tune(rule, groups)
