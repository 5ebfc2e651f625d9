"""Text encoders producing turn and attribute embeddings.

Two backends share one config:

* ``pretrained`` wraps a transformer checkpoint and uses the first-token
  ([CLS]) representation of ``user [SEP] system`` (or an attribute
  description) as the sequence embedding.
* ``mock`` is a deterministic, weight-free stand-in for tests. Its rule is
  part of the contract: whitespace-split the text, keep the first
  ``max_tokens`` tokens, map each token to a fixed Gaussian vector seeded by
  the first 8 bytes of sha256(token), and mean-pool. Identical text always
  yields the identical vector.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import torch

from .corpus import Dialogue, DialogueTurn, TaskSchema


class EncodingError(ValueError):
    pass


@dataclass(frozen=True)
class EncoderConfig:
    backend: str = "mock"  # "mock" or "pretrained"
    model_name: str = "bert-base-uncased"  # pretrained only
    hidden_size: int = 768
    max_tokens: int = 512
    fine_tune: bool = False
    share_encoders: bool = False  # one instance for both turns and attributes

    def __post_init__(self):
        if self.backend not in ("mock", "pretrained"):
            raise ValueError(f"unknown encoder backend {self.backend!r}")
        if self.hidden_size < 1 or self.max_tokens < 1:
            raise ValueError("hidden_size and max_tokens must be positive")

    def to_dict(self) -> dict:
        return {
            "backend": self.backend,
            "model_name": self.model_name,
            "hidden_size": self.hidden_size,
            "max_tokens": self.max_tokens,
            "fine_tune": self.fine_tune,
            "share_encoders": self.share_encoders,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EncoderConfig":
        return cls(**{k: v for k, v in d.items() if k in cls.__dataclass_fields__})


def _token_vector(token: str, hidden_size: int) -> np.ndarray:
    seed = int.from_bytes(hashlib.sha256(token.encode("utf-8")).digest()[:8], "big")
    rng = np.random.default_rng(seed)
    return rng.standard_normal(hidden_size)


class MockEncoder:
    """Hash-seeded Gaussian token embeddings, mean-pooled. No parameters."""

    def __init__(self, cfg: EncoderConfig):
        self.cfg = cfg
        self._cache: dict = {}

    def encode_text(self, text: str) -> np.ndarray:
        if text in self._cache:
            return self._cache[text]
        tokens = text.split()[: self.cfg.max_tokens]
        if not tokens:
            raise EncodingError("text has no content tokens")
        vec = np.mean([_token_vector(t, self.cfg.hidden_size) for t in tokens], axis=0)
        self._cache[text] = vec
        return vec

    def encode_texts(self, texts: List[str]) -> np.ndarray:
        return np.stack([self.encode_text(t) for t in texts])

    def encode_texts_torch(self, texts: List[str]) -> torch.Tensor:
        return torch.from_numpy(self.encode_texts(texts))

    def parameters(self):
        return []


class PretrainedEncoder:
    """Transformer backend; the [CLS] vector summarizes the sequence."""

    def __init__(self, cfg: EncoderConfig):
        from transformers import AutoModel, AutoTokenizer  # deferred heavy import

        self.cfg = cfg
        self.tokenizer = AutoTokenizer.from_pretrained(cfg.model_name)
        self.model = AutoModel.from_pretrained(cfg.model_name)
        if self.model.config.hidden_size != cfg.hidden_size:
            raise EncodingError(
                f"model hidden size {self.model.config.hidden_size} != configured {cfg.hidden_size}"
            )
        if not cfg.fine_tune:
            self.model.eval()

    def encode_texts_torch(self, texts: List[str]) -> torch.Tensor:
        # Head truncation to max_tokens keeps the [CLS]/[SEP] framing.
        batch = self.tokenizer(
            texts, truncation=True, max_length=self.cfg.max_tokens,
            padding=True, return_tensors="pt",
        )
        if int(batch["attention_mask"].sum()) == 0:
            raise EncodingError("tokenization produced zero content tokens")
        if self.cfg.fine_tune and self.model.training:
            out = self.model(**batch)
        else:
            with torch.no_grad():
                out = self.model(**batch)
        return out.last_hidden_state[:, 0, :]

    def encode_texts(self, texts: List[str]) -> np.ndarray:
        return self.encode_texts_torch(texts).detach().cpu().numpy()

    def parameters(self):
        return list(self.model.parameters()) if self.cfg.fine_tune else []


def build_encoder(cfg: EncoderConfig):
    if cfg.backend == "mock":
        return MockEncoder(cfg)
    return PretrainedEncoder(cfg)


class EncoderPair:
    """Turn and attribute encoders behind one config.

    Separate instances by default; ``share_encoders`` collapses them to one.
    For the mock backend the distinction is immaterial (no parameters).
    """

    def __init__(self, cfg: EncoderConfig):
        self.cfg = cfg
        self.turn_encoder = build_encoder(cfg)
        self.attribute_encoder = self.turn_encoder if cfg.share_encoders else build_encoder(cfg)

    def parameters(self):
        params = list(self.turn_encoder.parameters())
        if self.attribute_encoder is not self.turn_encoder:
            params += list(self.attribute_encoder.parameters())
        return params


def turn_text(turn: DialogueTurn) -> str:
    """The encoder input for one turn: user utterance then system utterance."""
    return (turn.user_utterance + " " + turn.system_utterance).strip()


def encode_turn(turn: DialogueTurn, cfg: EncoderConfig, encoder=None) -> np.ndarray:
    text = turn_text(turn)
    if not text:
        raise EncodingError(f"turn {turn.index}: empty after concatenation")
    encoder = encoder or build_encoder(cfg)
    try:
        return encoder.encode_texts([text])[0]
    except EncodingError as e:
        raise EncodingError(f"turn {turn.index}: {e}") from None


def encode_dialogue(dialogue: Dialogue, cfg: EncoderConfig, encoder=None) -> np.ndarray:
    """N x H matrix; row j is the embedding of turn j, in turn order."""
    encoder = encoder or build_encoder(cfg)
    rows = []
    for turn in dialogue.turns:
        try:
            rows.append(encode_turn(turn, cfg, encoder=encoder))
        except EncodingError as e:
            raise EncodingError(f"dialogue {dialogue.id!r}: {e}") from None
    return np.stack(rows)


def encode_attributes(schema: TaskSchema, cfg: EncoderConfig, encoder=None) -> np.ndarray:
    """M x H matrix; row i is the embedding of attribute i's description."""
    encoder = encoder or build_encoder(cfg)
    rows = []
    for attr in schema.attributes:
        try:
            rows.append(encoder.encode_texts([attr.description])[0])
        except EncodingError as e:
            raise EncodingError(f"attribute {attr.id!r}: {e}") from None
    return np.stack(rows)
