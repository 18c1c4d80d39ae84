"""Jensen-Shannon divergence in nats."""

from __future__ import annotations

import math

import numpy as np
import numpy.typing as npt
import torch
from scipy.special import rel_entr

from gcasim.errors import ConfigurationError

from .histogram import SoftHistogram

LN2 = math.log(2.0)


def _kl_to_mixture(p: torch.Tensor, m: torch.Tensor) -> torch.Tensor:
    support = p > 0
    p_safe = torch.where(support, p, torch.ones_like(p))
    m_safe = torch.where(support, m, torch.ones_like(m))
    terms = torch.where(support, p * (torch.log(p_safe) - torch.log(m_safe)), torch.zeros_like(p))
    return terms.sum()


def jsd_tensor(p: torch.Tensor, q: torch.Tensor) -> torch.Tensor:
    """Differentiable JSD of two probability vectors; `0 log 0` is taken as 0."""
    if p.shape != q.shape:
        raise ConfigurationError(
            f"distributions differ in shape: {tuple(p.shape)} vs {tuple(q.shape)}"
        )
    m = 0.5 * (p + q)
    value = 0.5 * _kl_to_mixture(p, m) + 0.5 * _kl_to_mixture(q, m)
    return value.clamp(0.0, LN2)


def jsd(p: SoftHistogram, q: SoftHistogram) -> torch.Tensor:
    """JSD of two histograms sharing bin count and range, in `[0, ln 2]`."""
    if not p.same_binning(q):
        raise ConfigurationError(
            f"mismatched binning: {p.bins} bins on [{p.lo}, {p.hi}] "
            f"vs {q.bins} bins on [{q.lo}, {q.hi}]"
        )
    return jsd_tensor(p.probs, q.probs)


def jsd_numpy(p: npt.ArrayLike, q: npt.ArrayLike) -> float:
    """Same divergence for plain arrays; inputs are renormalised to unit mass."""
    pa = np.asarray(p, dtype=np.float64)
    qa = np.asarray(q, dtype=np.float64)
    if pa.shape != qa.shape:
        raise ConfigurationError("distributions differ in shape")
    pa = pa / pa.sum()
    qa = qa / qa.sum()
    m = 0.5 * (pa + qa)
    value = 0.5 * float(np.sum(rel_entr(pa, m))) + 0.5 * float(np.sum(rel_entr(qa, m)))
    return min(max(value, 0.0), LN2)
