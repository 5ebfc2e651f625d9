"""Train the full satisfaction model on a synthetic corpus, checkpoint it,
and evaluate the reloaded model on the held-out test split."""

import tempfile
from pathlib import Path

from sgusm.encoder import EncoderConfig
from sgusm.evaluation import evaluate_model
from sgusm.importance import MMRConfig
from sgusm.synthetic import rule_corpus
from sgusm.trainer import Checkpoint, TrainConfig, train


def main():
    corpus = rule_corpus(n_train=30, n_valid=15, n_test=15, seed=0)
    enc_cfg = EncoderConfig(backend="mock", hidden_size=64)
    mmr_cfg = MMRConfig(top_k=1, lambda_=0.5)
    train_cfg = TrainConfig(learning_rate=2e-2, epochs=10, batch_size=16, seed=0)

    checkpoint = train(corpus, enc_cfg, mmr_cfg, train_cfg)
    print("epoch  train_loss  train_acc  valid_f1")
    for e in checkpoint.metrics["history"]:
        print(f"{e['epoch']:5d}  {e['train_loss']:10.4f}  {e['train_accuracy']:9.3f}"
              f"  {e['valid_macro_f1']:8.3f}")
    print(f"best epoch: {checkpoint.metrics['best_epoch']}")

    with tempfile.TemporaryDirectory() as tmp:
        path = checkpoint.save(Path(tmp) / "ckpt")
        loaded = Checkpoint.load(path)

    report = evaluate_model(loaded.model, corpus.test)
    print(f"\ntest accuracy={report.accuracy:.3f}  macro F1={report.macro_f1:.3f}")
    print("confusion matrix (rows = true class):")
    for row in report.confusion:
        print(f"  {row}")


if __name__ == "__main__":
    main()
