"""The weighted four-term training objective."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy.typing as npt
import torch

from gcasim.clustering.indices import canonical_labels, soft_silhouette_tensor
from gcasim.engine import RuleSpec
from gcasim.errors import ConfigurationError, DegenerateInputError
from gcasim.gates import GateNetwork

from .config import TrainConfig


@dataclass(frozen=True)
class LossBreakdown:
    total: torch.Tensor
    silhouette: torch.Tensor
    hardening: torch.Tensor
    margin: torch.Tensor
    entropy: torch.Tensor

    def as_dict(self) -> dict[str, float]:
        return {
            "loss": float(self.total.detach()),
            "loss_sil": float(self.silhouette.detach()),
            "loss_hard": float(self.hardening.detach()),
            "loss_margin": float(self.margin.detach()),
            "loss_ent": float(self.entropy.detach()),
        }


def gate_entropy(rule: RuleSpec) -> torch.Tensor:
    """Mean softmax entropy (nats) over every soft gate of the rule; 0 for hard rules."""
    entropies = []
    for part in rule.parts():
        if not isinstance(part, GateNetwork):
            continue
        for logits in part.logits:
            probs = torch.softmax(logits, dim=-1)
            entropies.append(torch.logsumexp(logits, dim=-1) - (probs * logits).sum(dim=-1))
    if not entropies:
        return torch.zeros((), dtype=torch.float64)
    return torch.cat(entropies).mean()


def separation_margin(
    D: torch.Tensor,  # noqa: N803
    labels: npt.ArrayLike,
    margin: float,
) -> torch.Tensor:
    """Hinge on `mean inter D - mean intra D`; zero once the gap reaches `margin`."""
    n = D.shape[0]
    codes, _ = canonical_labels(labels, n)
    same = torch.from_numpy(codes[:, None] == codes[None, :])
    off_diagonal = ~torch.eye(n, dtype=torch.bool)
    intra_mask = same & off_diagonal
    inter_mask = ~same
    zero = torch.zeros((), dtype=D.dtype)
    intra = D[intra_mask].mean() if bool(intra_mask.any()) else zero
    inter = D[inter_mask].mean() if bool(inter_mask.any()) else zero
    return torch.relu(margin - (inter - intra))


def size_entropy_penalty(
    labels: npt.ArrayLike, n: int, band: tuple[float, float]
) -> torch.Tensor:
    """Band hinge on the cluster-size entropy; band edges are fractions of `ln k`."""
    codes, k = canonical_labels(labels, n)
    sizes = torch.bincount(torch.from_numpy(codes), minlength=k).to(torch.float64)
    p = sizes / sizes.sum()
    entropy = -(p * torch.log(p)).sum()
    low, high = band[0] * math.log(k), band[1] * math.log(k)
    return torch.relu(low - entropy) + torch.relu(entropy - high)


def loss_total(
    D: torch.Tensor,  # noqa: N803
    labels: npt.ArrayLike,
    rule: RuleSpec,
    cfg: TrainConfig,
) -> LossBreakdown:
    """`alpha*L_sil + beta*L_hard + gamma*L_margin + delta*L_ent` on a soft distance matrix.

    Labels (and the medoids derived from them) are constants; gradients reach the rule
    logits through `D` and through the gate-entropy term.
    """
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ConfigurationError(f"distance tensor must be square, got {tuple(D.shape)}")
    n = D.shape[0]
    _, k = canonical_labels(labels, n)
    if k < 2:
        raise DegenerateInputError(f"the loss needs at least two clusters, got {k}")

    l_sil = 1.0 - soft_silhouette_tensor(D, labels, cfg.temperature)
    l_hard = gate_entropy(rule)
    l_margin = separation_margin(D, labels, cfg.margin)
    l_ent = size_entropy_penalty(labels, n, cfg.entropy_band)
    total = cfg.alpha * l_sil + cfg.beta * l_hard + cfg.gamma * l_margin + cfg.delta * l_ent
    return LossBreakdown(
        total=total, silhouette=l_sil, hardening=l_hard, margin=l_margin, entropy=l_ent
    )
