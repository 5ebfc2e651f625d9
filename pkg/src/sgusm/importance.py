"""Corpus-level attribute importance.

Per dialogue turn, a greedy maximal-marginal-relevance pass picks the top_k
attributes most relevant to the turn while penalizing redundancy among picks.
Picks become a binary presence vector, discounted by the natural log of the
turn position so early turns weigh more. The importance distribution is the
softmax of the discounted presence sums over every turn of every dialogue in
the pool (train split plus enabled unlabeled dialogues). No gradient flows
through this path; it is recomputed between epochs with the encoder in eval
mode and held constant within an epoch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from .corpus import Corpus, Dialogue
from .encoder import EncoderConfig, encode_attributes, encode_dialogue


class ImportanceError(ValueError):
    pass


@dataclass(frozen=True)
class MMRConfig:
    top_k: int = 5
    lambda_: float = 0.5

    def __post_init__(self):
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        if not 0.0 <= self.lambda_ <= 1.0:
            raise ValueError("lambda must be in [0, 1]")

    def to_dict(self) -> dict:
        return {"top_k": self.top_k, "lambda": self.lambda_}

    @classmethod
    def from_dict(cls, d: dict) -> "MMRConfig":
        return cls(top_k=d.get("top_k", 5), lambda_=d.get("lambda", d.get("lambda_", 0.5)))


def _unit_rows(X: np.ndarray, what: str) -> np.ndarray:
    norms = np.linalg.norm(X, axis=-1, keepdims=True)
    zero = np.nonzero(norms.ravel() == 0.0)[0]
    if zero.size:
        raise ImportanceError(f"zero-norm embedding for {what} index {int(zero[0])}")
    return X / norms


def mmr_select(d_j: np.ndarray, T: np.ndarray, cfg: MMRConfig) -> List[int]:
    """Greedy selection of min(top_k, M) attribute indices for one turn.

    Each step adds the attribute maximizing
    lambda * cos(t_i, d_j) - (1 - lambda) * max over picked of cos(t_i, t_k);
    the redundancy term is 0 on the first pick. Ties break to the lowest
    attribute index.
    """
    M = T.shape[0]
    Tn = _unit_rows(T, "attribute")
    dn = _unit_rows(d_j[None, :], "turn")[0]
    relevance = Tn @ dn  # (M,)
    pairwise = Tn @ Tn.T  # (M, M)

    selected: List[int] = []
    remaining = set(range(M))
    max_red = np.full(M, -np.inf)
    for _ in range(min(cfg.top_k, M)):
        best_idx, best_score = -1, -np.inf
        for i in sorted(remaining):
            redundancy = 0.0 if not selected else max_red[i]
            score = cfg.lambda_ * relevance[i] - (1.0 - cfg.lambda_) * redundancy
            if score > best_score:
                best_idx, best_score = i, score
        selected.append(best_idx)
        remaining.discard(best_idx)
        max_red = np.maximum(max_red, pairwise[:, best_idx])
    return selected


def presence_vector(selected: Sequence[int], M: int) -> np.ndarray:
    """Binary length-M vector with ones at the selected attribute indices."""
    if len(selected) == 0:
        raise ImportanceError("empty selection")
    F = np.zeros(M)
    for i in selected:
        if not 0 <= i < M:
            raise ImportanceError(f"attribute index {i} out of range for M={M}")
        F[i] = 1.0
    return F


def discount(F_j: np.ndarray, j: int) -> np.ndarray:
    """Divide the presence vector by ln(j + 1); j is the 1-based turn position."""
    if not isinstance(j, (int, np.integer)) or j < 1:
        raise ImportanceError(f"turn position must be an integer >= 1, got {j!r}")
    return F_j / math.log(j + 1)


def _softmax(x: np.ndarray) -> np.ndarray:
    e = np.exp(x - np.max(x))
    return e / e.sum()


def discounted_presence_sums(
    dialogues: Sequence[Dialogue],
    T: np.ndarray,
    encoder_cfg: EncoderConfig,
    mmr_cfg: MMRConfig,
    encoder=None,
) -> np.ndarray:
    """Pre-softmax raw sums of discounted presence vectors, fixed iteration order."""
    M = T.shape[0]
    total = np.zeros(M)
    for dialogue in dialogues:
        D = encode_dialogue(dialogue, encoder_cfg, encoder=encoder)
        for turn_idx in range(dialogue.num_turns):
            picks = mmr_select(D[turn_idx], T, mmr_cfg)
            total += discount(presence_vector(picks, M), turn_idx + 1)
    return total


def importance_from_dialogues(
    dialogues: Sequence[Dialogue],
    T: np.ndarray,
    encoder_cfg: EncoderConfig,
    mmr_cfg: MMRConfig,
    encoder=None,
) -> np.ndarray:
    if len(dialogues) == 0:
        raise ImportanceError("importance pool is empty")
    sums = discounted_presence_sums(dialogues, T, encoder_cfg, mmr_cfg, encoder=encoder)
    return _softmax(sums)


def importance_scores(
    corpus: Corpus,
    encoder_cfg: EncoderConfig,
    mmr_cfg: MMRConfig,
    use_unlabeled: bool = True,
    pool_size=None,
    encoder_pair=None,
) -> np.ndarray:
    """Length-M importance distribution over the corpus's attributes."""
    if mmr_cfg.top_k > corpus.schema.size:
        # More picks than attributes degenerates to all-ones presence; allowed.
        pass
    turn_encoder = encoder_pair.turn_encoder if encoder_pair else None
    attr_encoder = encoder_pair.attribute_encoder if encoder_pair else None
    T = encode_attributes(corpus.schema, encoder_cfg, encoder=attr_encoder)
    pool = corpus.importance_pool(use_unlabeled, pool_size)
    return importance_from_dialogues(pool, T, encoder_cfg, mmr_cfg, encoder=turn_encoder)


def importance_report(schema, S: np.ndarray) -> List[dict]:
    """Ranked [{attribute_id, score, rank}] records, rank 1 = most important.

    Ties in score rank by attribute index for determinism.
    """
    order = sorted(range(len(S)), key=lambda i: (-S[i], i))
    return [
        {"attribute_id": schema.attributes[i].id, "score": float(S[i]), "rank": r + 1}
        for r, i in enumerate(order)
    ]
