"""Differentiable fixed-range histograms with a triangular kernel."""

from __future__ import annotations

import math
from dataclasses import dataclass

import torch

from gcasim.errors import ConfigurationError, ValidationError

DEFAULT_BINS = 64


@dataclass(frozen=True)
class SoftHistogram:
    """Bin probabilities over `[lo, hi]` split into `bins` equal-width bins."""

    probs: torch.Tensor
    lo: float
    hi: float

    @property
    def bins(self) -> int:
        return int(self.probs.shape[0])

    def same_binning(self, other: SoftHistogram) -> bool:
        return (
            self.bins == other.bins
            and math.isclose(self.lo, other.lo, rel_tol=0.0, abs_tol=1e-12)
            and math.isclose(self.hi, other.hi, rel_tol=0.0, abs_tol=1e-12)
        )

    def centers(self) -> torch.Tensor:
        width = (self.hi - self.lo) / self.bins
        return self.lo + (torch.arange(self.bins, dtype=torch.float64) + 0.5) * width


def soft_histogram(
    values: torch.Tensor, lo: float, hi: float, bins: int = DEFAULT_BINS
) -> SoftHistogram:
    """Each value spreads unit mass over its two nearest bin centres by linear interpolation.

    Values are clamped to `[lo, hi]`; mass below the first centre or above the last one
    stays in the edge bin. When `lo == hi` all mass goes to bin 0.
    """
    if bins < 2:
        raise ConfigurationError(f"bins must be at least 2, got {bins}")
    lo, hi = float(lo), float(hi)
    if lo > hi:
        raise ConfigurationError(f"histogram range is inverted: lo={lo} > hi={hi}")
    x = torch.as_tensor(values, dtype=torch.float64).reshape(-1)
    n = x.shape[0]
    if n == 0:
        raise ValidationError("cannot build a histogram from no values")
    if hi == lo:
        probs = torch.zeros(bins, dtype=torch.float64)
        probs[0] = 1.0
        # Keep the result attached to the graph so callers can backpropagate uniformly.
        return SoftHistogram(probs + 0.0 * x.sum(), lo, hi)

    width = (hi - lo) / bins
    position = ((x.clamp(lo, hi) - lo) / width - 0.5).clamp(0.0, bins - 1.0)
    left = torch.floor(position.detach()).long().clamp(max=bins - 2)
    frac = position - left.to(torch.float64)
    probs = torch.zeros(bins, dtype=torch.float64)
    probs = probs.index_add(0, left, 1.0 - frac).index_add(0, left + 1, frac)
    return SoftHistogram(probs / n, lo, hi)
