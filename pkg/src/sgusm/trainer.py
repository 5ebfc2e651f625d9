"""End-to-end training: cross-entropy objective, Adam, per-epoch importance
refresh, and best-checkpoint selection on validation macro-F1.

Checkpoints are directories:

    config.json     resolved configs + schema + format version
    weights.pt      state dicts (fulfillment, classifier, importance, encoders
                    when fine-tuned)
    metrics.json    per-epoch trajectory and the selected epoch's metrics
    importance.json ranked importance snapshot
    manifest.json   shapes, schema fingerprint, seed
"""

from __future__ import annotations

import copy
import json
import logging
import random
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, List, Optional

import numpy as np
import torch

from .corpus import Corpus, Dialogue, SatisfactionLabel, TaskSchema
from .encoder import EncoderConfig
from .evaluation import MetricsReport, compute_metrics, evaluate_model
from .importance import MMRConfig, importance_report
from .model import Model, VARIANT_ALIASES, VARIANTS

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
PROB_FLOOR = 1e-12


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-4
    epochs: int = 20
    batch_size: int = 16
    seed: int = 0
    optimizer: str = "adam"
    selection_metric: str = "macro_f1"
    importance_refresh: str = "per_epoch"
    attention_mode: str = "standard"
    use_unlabeled: bool = False
    unlabeled_pool_size: Optional[int] = None  # None = whole pool when enabled
    variant: str = "full"
    dropout: float = 0.1
    grad_clip: Optional[float] = 1.0  # None disables (strict-recipe mode)

    def __post_init__(self):
        if self.learning_rate <= 0 or self.batch_size < 1 or self.epochs < 0:
            raise ValueError("learning_rate/batch_size must be positive, epochs >= 0")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")

    def to_dict(self) -> dict:
        return {
            "learning_rate": self.learning_rate,
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "seed": self.seed,
            "optimizer": self.optimizer,
            "selection_metric": self.selection_metric,
            "importance_refresh": self.importance_refresh,
            "attention_mode": self.attention_mode,
            "use_unlabeled": self.use_unlabeled,
            "unlabeled_pool_size": self.unlabeled_pool_size,
            "variant": self.variant,
            "dropout": self.dropout,
            "grad_clip": self.grad_clip,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        return cls(**{k: v for k, v in d.items() if k in cls.__dataclass_fields__})


def nll_loss(p: torch.Tensor, y: int) -> torch.Tensor:
    """Negative log-probability of the true class, clamped for log-safety."""
    return -torch.log(torch.clamp(p[int(y)], min=PROB_FLOOR))


def batch_loss(ps: List[torch.Tensor], ys: List[int]) -> torch.Tensor:
    return torch.stack([nll_loss(p, y) for p, y in zip(ps, ys)]).mean()


@dataclass
class Checkpoint:
    model: Model
    encoder_cfg: EncoderConfig
    mmr_cfg: MMRConfig
    train_cfg: TrainConfig
    metrics: dict  # {"history": [...], "best": {...}, "best_epoch": int}

    def save(self, directory) -> Path:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        config = {
            "format_version": FORMAT_VERSION,
            "schema": self.model.schema.to_dict(),
            "encoder": self.encoder_cfg.to_dict(),
            "mmr": self.mmr_cfg.to_dict(),
            "train": self.train_cfg.to_dict(),
        }
        (directory / "config.json").write_text(
            json.dumps(config, indent=2, sort_keys=True, ensure_ascii=False), encoding="utf-8"
        )
        torch.save(self.model.state_dict(), directory / "weights.pt")
        (directory / "metrics.json").write_text(
            json.dumps(self.metrics, indent=2, sort_keys=True), encoding="utf-8"
        )
        (directory / "importance.json").write_text(
            json.dumps(importance_report(self.model.schema, self.model.importance), indent=2),
            encoding="utf-8",
        )
        manifest = {
            "format_version": FORMAT_VERSION,
            "hidden_size": self.encoder_cfg.hidden_size,
            "num_attributes": self.model.schema.size,
            "num_classes": 3,
            "schema_fingerprint": self.model.schema.fingerprint(),
            "seed": self.train_cfg.seed,
        }
        (directory / "manifest.json").write_text(
            json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8"
        )
        return directory

    @classmethod
    def load(cls, directory) -> "Checkpoint":
        directory = Path(directory)
        config = json.loads((directory / "config.json").read_text(encoding="utf-8"))
        if config.get("format_version") != FORMAT_VERSION:
            raise ValueError(f"unsupported checkpoint format: {config.get('format_version')}")
        schema = TaskSchema.from_dict(config["schema"])
        encoder_cfg = EncoderConfig.from_dict(config["encoder"])
        mmr_cfg = MMRConfig.from_dict(config["mmr"])
        train_cfg = TrainConfig.from_dict(config["train"])
        model = Model(
            schema, encoder_cfg, mmr_cfg,
            attention_mode=train_cfg.attention_mode,
            variant=train_cfg.variant,
            dropout=train_cfg.dropout,
        )
        state = torch.load(directory / "weights.pt", weights_only=True)
        model.load_state_dict(state)
        manifest = json.loads((directory / "manifest.json").read_text(encoding="utf-8"))
        if manifest["schema_fingerprint"] != schema.fingerprint():
            raise ValueError("schema fingerprint mismatch in checkpoint")
        metrics = json.loads((directory / "metrics.json").read_text(encoding="utf-8"))
        return cls(model=model, encoder_cfg=encoder_cfg, mmr_cfg=mmr_cfg,
                   train_cfg=train_cfg, metrics=metrics)


def _seed_everything(seed: int):
    random.seed(seed)
    np.random.seed(seed % 2**32)
    torch.manual_seed(seed)


def train(
    corpus: Corpus,
    encoder_cfg: EncoderConfig,
    mmr_cfg: MMRConfig,
    train_cfg: TrainConfig,
    on_forward: Optional[Callable] = None,
) -> Checkpoint:
    """Train on the corpus's train split, selecting the best epoch by
    validation macro-F1. Importance is refreshed at each epoch start over the
    train split plus (when enabled) the unlabeled pool, then held fixed.

    ``on_forward`` is passed through to every model forward; harnesses use it
    to check attention/importance/probability invariants.
    """
    if not corpus.train or not corpus.valid:
        raise ValueError("training requires non-empty train and valid splits")
    _seed_everything(train_cfg.seed)

    model = Model(
        corpus.schema, encoder_cfg, mmr_cfg,
        attention_mode=train_cfg.attention_mode,
        variant=train_cfg.variant,
        dropout=train_cfg.dropout,
    )
    optimizer = torch.optim.Adam(model.trainable_parameters(), lr=train_cfg.learning_rate)
    importance_pool = corpus.importance_pool(
        train_cfg.use_unlabeled, train_cfg.unlabeled_pool_size
    )

    history: List[dict] = []
    best_state = copy.deepcopy(model.state_dict())
    best_metric = -1.0
    best_epoch = -1
    best_report: Optional[MetricsReport] = None

    def validate() -> MetricsReport:
        return evaluate_model(model, corpus.valid)

    if train_cfg.epochs == 0:
        model.refresh_importance(importance_pool)
        report = validate()
        metrics = {
            "history": [],
            "best_epoch": -1,
            "best": report.to_dict(),
        }
        return Checkpoint(model, encoder_cfg, mmr_cfg, train_cfg, metrics)

    order_rng = np.random.default_rng(train_cfg.seed)
    diverged = False
    for epoch in range(train_cfg.epochs):
        model.refresh_importance(importance_pool)
        order = order_rng.permutation(len(corpus.train))
        epoch_losses = []
        for start in range(0, len(order), train_cfg.batch_size):
            batch = [corpus.train[i] for i in order[start:start + train_cfg.batch_size]]
            ps, ys = [], []
            for dialogue in batch:
                _, p, _ = model.forward(dialogue, train_mode=True, on_forward=on_forward)
                ps.append(p)
                ys.append(int(dialogue.label))
            loss = batch_loss(ps, ys)
            if not torch.isfinite(loss):
                logger.error("non-finite loss at epoch %d; aborting, keeping best checkpoint", epoch)
                diverged = True
                break
            optimizer.zero_grad()
            loss.backward()
            if train_cfg.grad_clip is not None:
                torch.nn.utils.clip_grad_norm_(model.trainable_parameters(), train_cfg.grad_clip)
            optimizer.step()
            epoch_losses.append(loss.item())
        if diverged:
            break
        report = validate()
        train_report = evaluate_model(model, corpus.train)
        entry = {
            "epoch": epoch,
            "train_loss": float(np.mean(epoch_losses)) if epoch_losses else None,
            "train_accuracy": train_report.accuracy,
            "valid_macro_f1": report.macro_f1,
            "valid_accuracy": report.accuracy,
        }
        history.append(entry)
        logger.info("epoch %d: loss=%.4f valid_macro_f1=%.4f",
                    epoch, entry["train_loss"], report.macro_f1)
        if report.macro_f1 > best_metric:
            best_metric = report.macro_f1
            best_state = copy.deepcopy(model.state_dict())
            best_epoch = epoch
            best_report = report

    model.load_state_dict(best_state)
    if best_report is None:  # diverged before the first validation
        model.refresh_importance(importance_pool)
        best_report = validate()
    metrics = {
        "history": history,
        "best_epoch": best_epoch,
        "best": best_report.to_dict(),
        "diverged": diverged,
    }
    return Checkpoint(model, encoder_cfg, mmr_cfg, train_cfg, metrics)


def ablate(
    corpus: Corpus,
    encoder_cfg: EncoderConfig,
    mmr_cfg: MMRConfig,
    train_cfg: TrainConfig,
    variant: str,
    on_forward: Optional[Callable] = None,
) -> Checkpoint:
    """Train an ablated model. ``variant`` accepts the internal names or the
    reporting spellings "w/oImp" / "w/oFul"."""
    resolved = VARIANT_ALIASES.get(variant, variant)
    if resolved not in VARIANTS:
        raise ValueError(f"unknown ablation variant {variant!r}")
    return train(corpus, encoder_cfg, mmr_cfg, replace(train_cfg, variant=resolved),
                 on_forward=on_forward)
