"""Dialogue-attended attribute fulfillment representations.

For each attribute embedding t_i, a bilinear form against the turn embeddings
D yields attention weights over turns; the fulfillment representation of the
attribute is the attention-weighted average of turn embeddings.

Two attention modes ship:

* ``standard`` (default): softmax of the raw bilinear scores.
* ``literal``: softmax applied on top of an elementwise exp of the scores
  (a double exponentiation), with scores clamped to +-30 before the inner
  exp to keep it finite.
"""

from __future__ import annotations

import math

import torch
import torch.nn as nn

ATTENTION_MODES = ("standard", "literal")
SCORE_CLAMP = 30.0


def attention_weights(D: torch.Tensor, t_i: torch.Tensor, W_a: torch.Tensor,
                      mode: str = "standard") -> torch.Tensor:
    """Length-N probability vector of turn weights for one attribute.

    D is N x H, t_i is H, W_a is H x H.
    """
    if mode not in ATTENTION_MODES:
        raise ValueError(f"unknown attention mode {mode!r}")
    scores = D @ (W_a @ t_i)  # (N,)
    if mode == "literal":
        scores = torch.exp(torch.clamp(scores, -SCORE_CLAMP, SCORE_CLAMP))
    weights = torch.softmax(scores, dim=-1)
    if not torch.isfinite(weights).all():
        raise FloatingPointError("non-finite attention weights")
    return weights


class FulfillmentLayer(nn.Module):
    """Bilinear attention over dialogue turns, one weight vector per attribute.

    The interaction matrix is initialized uniform in [-1/sqrt(H), 1/sqrt(H)]
    so initial attention starts near-uniform.
    """

    def __init__(self, hidden_size: int, mode: str = "standard"):
        super().__init__()
        if mode not in ATTENTION_MODES:
            raise ValueError(f"unknown attention mode {mode!r}")
        self.mode = mode
        bound = 1.0 / math.sqrt(hidden_size)
        self.W_a = nn.Parameter(torch.empty(hidden_size, hidden_size).uniform_(-bound, bound))

    def attention(self, D: torch.Tensor, T: torch.Tensor) -> torch.Tensor:
        """M x N attention matrix; row i is the turn distribution for attribute i."""
        # score[i, j] = d_j^T W_a t_i, matching the per-attribute form.
        scores = T @ self.W_a.T @ D.T  # (M, N)
        if self.mode == "literal":
            scores = torch.exp(torch.clamp(scores, -SCORE_CLAMP, SCORE_CLAMP))
        return torch.softmax(scores, dim=-1)

    def forward(self, D: torch.Tensor, T: torch.Tensor):
        """Return (fulfillment M x H, attention M x N).

        Row i of the fulfillment matrix is the attention-weighted average of
        the rows of D, i.e. a convex combination of turn embeddings.
        """
        A = self.attention(D, T)
        if not torch.isfinite(A).all():
            raise FloatingPointError("non-finite attention weights")
        return A @ D, A
