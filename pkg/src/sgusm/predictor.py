"""Satisfaction prediction head.

The dialogue-level representation h is the importance-weighted sum of the
per-attribute fulfillment representations. A two-hidden-layer MLP (widths
equal to the encoder hidden size, ReLU, dropout 0.1 after each hidden
activation) maps h to logits over the three satisfaction classes.
"""

from __future__ import annotations

import torch
import torch.nn as nn

NUM_CLASSES = 3
CLASS_NAMES = ("dissatisfied", "neutral", "satisfied")


def aggregate(fulfillment: torch.Tensor, S: torch.Tensor) -> torch.Tensor:
    """h = sum_i S_i * t_i^a. ``fulfillment`` is M x H, ``S`` length M."""
    if fulfillment.shape[0] != S.shape[0]:
        raise ValueError(
            f"fulfillment has {fulfillment.shape[0]} attributes but importance has {S.shape[0]}"
        )
    return S @ fulfillment


class SatisfactionClassifier(nn.Module):
    def __init__(self, hidden_size: int, dropout: float = 0.1):
        super().__init__()
        self.mlp = nn.Sequential(
            nn.Linear(hidden_size, hidden_size),
            nn.ReLU(),
            nn.Dropout(dropout),
            nn.Linear(hidden_size, hidden_size),
            nn.ReLU(),
            nn.Dropout(dropout),
            nn.Linear(hidden_size, NUM_CLASSES),
        )

    def forward(self, h: torch.Tensor) -> torch.Tensor:
        """Logits over the three classes; softmax is the caller's concern."""
        if not torch.isfinite(h).all():
            raise FloatingPointError("non-finite aggregated representation")
        return self.mlp(h)

    def predict(self, h: torch.Tensor, train_mode: bool = False) -> torch.Tensor:
        """Probability distribution over classes; dropout active only in train mode."""
        was_training = self.training
        self.train(train_mode)
        try:
            p = torch.softmax(self.forward(h), dim=-1)
        finally:
            self.train(was_training)
        if not torch.isfinite(p).all():
            raise FloatingPointError("non-finite class probabilities")
        return p
