"""Margin ranking loss over (positive, negative) sample pairs."""

from __future__ import annotations

from typing import List, Sequence

import torch
from torch import Tensor

from .data import Sample, valid_pair


class PairingError(ValueError):
    """Raised when a batch contains no trainable pair."""


def pair_indices(samples: Sequence[Sample]) -> List[tuple]:
    """All (positive index, negative index) pairs trainable under valid_pair."""
    pos = [i for i, s in enumerate(samples) if s.label == "positive"]
    neg = [j for j, s in enumerate(samples) if s.label == "negative"]
    return [(i, j) for i in pos for j in neg if valid_pair(samples[i], samples[j])]


def contrastive_loss(values: Tensor, samples: Sequence[Sample], margin: float = 0.1) -> Tensor:
    """Mean over trainable pairs of max(0, margin + value_pos - value_neg).

    `values[i]` must be the model score of `samples[i]`. A batch with no
    trainable pair is an error, not a silent zero.
    """
    pairs = pair_indices(samples)
    if not pairs:
        raise PairingError("batch contains no (positive, negative) pair")
    pos_idx = torch.tensor([i for i, _ in pairs])
    neg_idx = torch.tensor([j for _, j in pairs])
    terms = torch.clamp(margin + values[pos_idx] - values[neg_idx], min=0.0)
    return terms.mean()


def ranking_accuracy(values: Sequence[float], samples: Sequence[Sample]) -> float:
    """Fraction of trainable pairs ranked correctly (positive strictly lower);
    NaN-free inputs assumed. Returns float('nan') when no pair exists."""
    pairs = pair_indices(samples)
    if not pairs:
        return float("nan")
    good = sum(1 for i, j in pairs if values[i] < values[j])
    return good / len(pairs)
