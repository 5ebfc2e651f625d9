"""End-to-end model bundle: encoders, fulfillment layer, importance, classifier.

A ``Model`` owns the trainable modules plus the current importance
distribution (held constant between refreshes) and cached attribute
embeddings. Ablation variants:

* ``no_importance``: importance replaced by the uniform distribution.
* ``no_fulfillment``: fulfillment representations replaced by the raw
  attribute embeddings, so the dialogue influences nothing but importance.
"""

from __future__ import annotations

from typing import Callable, Optional

import numpy as np
import torch

from .corpus import Dialogue, TaskSchema
from .encoder import EncoderConfig, EncoderPair, encode_attributes, encode_dialogue
from .fulfillment import FulfillmentLayer
from .importance import MMRConfig, importance_from_dialogues
from .predictor import NUM_CLASSES, SatisfactionClassifier, aggregate

VARIANTS = ("full", "no_importance", "no_fulfillment")
# CLI spellings of the ablation variants.
VARIANT_ALIASES = {"full": "full", "w/oImp": "no_importance", "w/oFul": "no_fulfillment"}


class Model:
    def __init__(
        self,
        schema: TaskSchema,
        encoder_cfg: EncoderConfig,
        mmr_cfg: MMRConfig,
        attention_mode: str = "standard",
        variant: str = "full",
        dropout: float = 0.1,
    ):
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}")
        self.schema = schema
        self.encoder_cfg = encoder_cfg
        self.mmr_cfg = mmr_cfg
        self.variant = variant
        self.encoders = EncoderPair(encoder_cfg)
        self.fulfillment = FulfillmentLayer(encoder_cfg.hidden_size, mode=attention_mode)
        self.classifier = SatisfactionClassifier(encoder_cfg.hidden_size, dropout=dropout)
        self.importance = np.full(schema.size, 1.0 / schema.size)
        self._T: Optional[torch.Tensor] = None
        self._dialogue_cache: dict = {}

    # -- parameters ---------------------------------------------------------

    def trainable_parameters(self):
        params = list(self.fulfillment.parameters()) + list(self.classifier.parameters())
        if self.encoder_cfg.fine_tune:
            params += self.encoders.parameters()
        return params

    def train_mode(self, on: bool):
        self.fulfillment.train(on)
        self.classifier.train(on)

    # -- embeddings ---------------------------------------------------------

    @property
    def _encoder_is_static(self) -> bool:
        return not (self.encoder_cfg.fine_tune and self.encoders.parameters())

    def attribute_embeddings(self) -> torch.Tensor:
        if self._encoder_is_static:
            if self._T is None:
                T = encode_attributes(self.schema, self.encoder_cfg,
                                      encoder=self.encoders.attribute_encoder)
                self._T = torch.as_tensor(T, dtype=torch.get_default_dtype())
            return self._T
        T = self.encoders.attribute_encoder.encode_texts_torch(
            [a.description for a in self.schema.attributes]
        )
        return T.to(torch.get_default_dtype())

    def dialogue_embeddings(self, dialogue: Dialogue) -> torch.Tensor:
        if self._encoder_is_static:
            cached = self._dialogue_cache.get(dialogue.id)
            if cached is None:
                D = encode_dialogue(dialogue, self.encoder_cfg,
                                    encoder=self.encoders.turn_encoder)
                cached = torch.as_tensor(D, dtype=torch.get_default_dtype())
                self._dialogue_cache[dialogue.id] = cached
            return cached
        from .encoder import turn_text

        D = self.encoders.turn_encoder.encode_texts_torch(
            [turn_text(t) for t in dialogue.turns]
        )
        return D.to(torch.get_default_dtype())

    # -- importance ---------------------------------------------------------

    def refresh_importance(self, dialogues) -> np.ndarray:
        """Recompute the importance distribution over the given pool (eval mode,
        no gradient); a no_importance model keeps the uniform vector."""
        if self.variant == "no_importance":
            self.importance = np.full(self.schema.size, 1.0 / self.schema.size)
            return self.importance
        with torch.no_grad():
            T = self.attribute_embeddings().detach().cpu().numpy()
        self.importance = importance_from_dialogues(
            dialogues, T, self.encoder_cfg, self.mmr_cfg,
            encoder=self.encoders.turn_encoder if self._encoder_is_static else None,
        )
        return self.importance

    # -- forward ------------------------------------------------------------

    def forward(self, dialogue: Dialogue, train_mode: bool = False,
                on_forward: Optional[Callable] = None):
        """Return (logits, p, attention M x N) for one dialogue.

        ``on_forward`` receives (attention, importance, p) as numpy arrays;
        used by invariant-checking harnesses.
        """
        self.train_mode(train_mode)
        D = self.dialogue_embeddings(dialogue)
        T = self.attribute_embeddings()
        if self.variant == "no_fulfillment":
            fulfillment = T
            A = self.fulfillment.attention(D, T)  # reported, unused downstream
        else:
            fulfillment, A = self.fulfillment(D, T)
        S = torch.as_tensor(self.importance, dtype=torch.get_default_dtype())
        h = aggregate(fulfillment, S)
        logits = self.classifier(h)
        p = torch.softmax(logits, dim=-1)
        if on_forward is not None:
            on_forward(A.detach().cpu().numpy(), self.importance,
                       p.detach().cpu().numpy())
        return logits, p, A

    def predict_proba(self, dialogue: Dialogue) -> np.ndarray:
        with torch.no_grad():
            _, p, _ = self.forward(dialogue, train_mode=False)
        return p.cpu().numpy()

    def predict_class(self, dialogue: Dialogue) -> int:
        # np.argmax breaks ties toward the lower class index.
        return int(np.argmax(self.predict_proba(dialogue)))

    def inspect(self, dialogue: Dialogue) -> dict:
        """JSON-serializable record for case inspection: class probabilities,
        per-attribute turn attention, and the importance distribution."""
        with torch.no_grad():
            _, p, A = self.forward(dialogue, train_mode=False)
        return {
            "dialogue_id": dialogue.id,
            "probabilities": [float(x) for x in p],
            "predicted_class": int(np.argmax(p.cpu().numpy())),
            "attention": {
                attr.id: [float(w) for w in A[i]]
                for i, attr in enumerate(self.schema.attributes)
            },
            "importance": {
                attr.id: float(self.importance[i])
                for i, attr in enumerate(self.schema.attributes)
            },
        }

    # -- state --------------------------------------------------------------

    def state_dict(self) -> dict:
        state = {
            "fulfillment": self.fulfillment.state_dict(),
            "classifier": self.classifier.state_dict(),
            "importance": torch.as_tensor(self.importance),
        }
        if self.encoder_cfg.backend == "pretrained" and self.encoder_cfg.fine_tune:
            state["turn_encoder"] = self.encoders.turn_encoder.model.state_dict()
            if self.encoders.attribute_encoder is not self.encoders.turn_encoder:
                state["attribute_encoder"] = self.encoders.attribute_encoder.model.state_dict()
        return state

    def load_state_dict(self, state: dict):
        self.fulfillment.load_state_dict(state["fulfillment"])
        self.classifier.load_state_dict(state["classifier"])
        self.importance = np.asarray(state["importance"], dtype=np.float64)
        if "turn_encoder" in state:
            self.encoders.turn_encoder.model.load_state_dict(state["turn_encoder"])
        if "attribute_encoder" in state:
            self.encoders.attribute_encoder.model.load_state_dict(state["attribute_encoder"])
        self._T = None
        self._dialogue_cache.clear()

    def rebind_schema(self, schema: TaskSchema):
        """Point the model at a different schema (zero-shot transfer).

        Attributes enter only through encoded descriptions, so no parameter
        shapes change; cached embeddings and importance are reset.
        """
        self.schema = schema
        self._T = None
        self._dialogue_cache.clear()
        self.importance = np.full(schema.size, 1.0 / schema.size)
