"""Metrics and the analysis harnesses: held-out evaluation, zero-shot
cross-schema transfer, and unlabeled-pool scaling.

All averaging is macro over the three satisfaction classes. Classes with no
support and no predictions contribute 0 to the macro averages.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from .corpus import Corpus, Dialogue
from .predictor import CLASS_NAMES, NUM_CLASSES


@dataclass
class MetricsReport:
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    per_class: List[dict]  # [{class, precision, recall, f1, support}]
    confusion: List[List[int]]  # rows = true class, cols = predicted
    n_examples: int

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "macro_f1": self.macro_f1,
            "per_class": self.per_class,
            "confusion": self.confusion,
            "n_examples": self.n_examples,
        }

    def csv_row(self) -> str:
        return ",".join(
            f"{v:.6f}" for v in (self.accuracy, self.macro_precision,
                                 self.macro_recall, self.macro_f1)
        )


def compute_metrics(y_true: Sequence[int], y_pred: Sequence[int]) -> MetricsReport:
    if len(y_true) == 0:
        raise ValueError("cannot compute metrics on an empty split")
    if len(y_true) != len(y_pred):
        raise ValueError("label/prediction length mismatch")
    confusion = np.zeros((NUM_CLASSES, NUM_CLASSES), dtype=int)
    for t, p in zip(y_true, y_pred):
        confusion[t, p] += 1
    total = confusion.sum()
    per_class = []
    precisions, recalls, f1s = [], [], []
    for c in range(NUM_CLASSES):
        tp = confusion[c, c]
        support = confusion[c, :].sum()
        predicted = confusion[:, c].sum()
        precision = tp / predicted if predicted else 0.0
        recall = tp / support if support else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_class.append({
            "class": CLASS_NAMES[c],
            "precision": float(precision),
            "recall": float(recall),
            "f1": float(f1),
            "support": int(support),
        })
        precisions.append(precision)
        recalls.append(recall)
        f1s.append(f1)
    return MetricsReport(
        accuracy=float(np.trace(confusion) / total),
        macro_precision=float(np.mean(precisions)),
        macro_recall=float(np.mean(recalls)),
        macro_f1=float(np.mean(f1s)),
        per_class=per_class,
        confusion=confusion.tolist(),
        n_examples=int(total),
    )


def evaluate_model(model, split: Sequence[Dialogue]) -> MetricsReport:
    """Deterministic metrics from argmax predictions over a labeled split."""
    if len(split) == 0:
        raise ValueError("cannot evaluate an empty split")
    y_true, y_pred = [], []
    for dialogue in split:
        if dialogue.label is None:
            raise ValueError(f"dialogue {dialogue.id!r} has no label")
        y_true.append(int(dialogue.label))
        y_pred.append(model.predict_class(dialogue))
    return compute_metrics(y_true, y_pred)


def transfer_evaluate(model, target_corpus: Corpus, split: str = "test") -> MetricsReport:
    """Zero-shot evaluation on a different schema: re-encode the target
    schema's attribute descriptions, recompute importance from the target
    evaluation dialogues' text only (labels untouched), and run inference.
    No parameters are updated."""
    dialogues = target_corpus.split(split)
    if len(dialogues) == 0:
        raise ValueError(f"target split {split!r} is empty")
    original_schema = model.schema
    original_importance = model.importance
    try:
        model.rebind_schema(target_corpus.schema)
        # Importance for the unseen schema comes from target-side dialogue text.
        unlabeled_view = [Dialogue(id=d.id, turns=d.turns, label=None) for d in dialogues]
        model.refresh_importance(unlabeled_view)
        return evaluate_model(model, dialogues)
    finally:
        model.rebind_schema(original_schema)
        model.importance = original_importance


def unlabeled_scaling(
    corpus: Corpus,
    encoder_cfg,
    mmr_cfg,
    train_cfg,
    pool_sizes: Sequence[int],
) -> List[Tuple[int, MetricsReport]]:
    """Train one model per nested unlabeled pool size; report test metrics.

    Pool size 0 reproduces the labeled-only setting. Pools are nested prefixes
    of the unlabeled list so larger pools strictly contain smaller ones.
    """
    from dataclasses import replace

    from .trainer import train

    for size in pool_sizes:
        if size > len(corpus.unlabeled):
            raise ValueError(
                f"pool size {size} exceeds available unlabeled dialogues ({len(corpus.unlabeled)})"
            )
    results = []
    for size in pool_sizes:
        cfg = replace(train_cfg, use_unlabeled=size > 0, unlabeled_pool_size=size)
        checkpoint = train(corpus, encoder_cfg, mmr_cfg, cfg)
        report = evaluate_model(checkpoint.model, corpus.test)
        results.append((size, report))
    return results
