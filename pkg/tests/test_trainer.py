import hashlib
import math

import numpy as np
import pytest
import torch

from sgusm.evaluation import evaluate_model
from sgusm.synthetic import rule_corpus
from sgusm.trainer import Checkpoint, TrainConfig, ablate, batch_loss, nll_loss, train


class TestLoss:
    def test_perfect_prediction_zero_loss(self):
        p = torch.tensor([1.0, 0.0, 0.0])
        assert nll_loss(p, 0).item() == 0.0

    def test_uniform_prediction_ln3(self):
        p = torch.full((3,), 1 / 3)
        for y in range(3):
            assert abs(nll_loss(p, y).item() - math.log(3)) < 1e-6

    def test_quarter_probability_ln4(self):
        p = torch.tensor([0.5, 0.25, 0.25])
        assert abs(nll_loss(p, 1).item() - math.log(4)) < 1e-6

    def test_zero_probability_clamped(self):
        p = torch.tensor([0.0, 1.0, 0.0])
        loss = nll_loss(p, 0)
        assert torch.isfinite(loss)
        assert abs(loss.item() - -math.log(1e-12)) < 1e-3

    def test_batch_loss_is_mean(self):
        ps = [torch.tensor([1.0, 0.0, 0.0]), torch.full((3,), 1 / 3)]
        loss = batch_loss(ps, [0, 2])
        assert abs(loss.item() - math.log(3) / 2) < 1e-6


@pytest.fixture(scope="module")
def overfit_run(encoder_cfg_module, mmr_cfg_module):
    corpus = rule_corpus(n_train=30, n_valid=15, n_test=15, seed=0)
    cfg = TrainConfig(learning_rate=2e-2, epochs=12, batch_size=16, seed=1)
    checkpoint = train(corpus, encoder_cfg_module, mmr_cfg_module, cfg)
    return corpus, cfg, checkpoint


@pytest.fixture(scope="module")
def encoder_cfg_module():
    from sgusm.encoder import EncoderConfig

    return EncoderConfig(backend="mock", hidden_size=64)


@pytest.fixture(scope="module")
def mmr_cfg_module():
    from sgusm.importance import MMRConfig

    return MMRConfig(top_k=1, lambda_=0.5)


class TestTrain:
    def test_overfits_rule_corpus(self, overfit_run):
        _, _, checkpoint = overfit_run
        best_train_acc = max(e["train_accuracy"] for e in checkpoint.metrics["history"])
        assert best_train_acc >= 0.95

    def test_loss_decreases(self, overfit_run):
        _, _, checkpoint = overfit_run
        history = checkpoint.metrics["history"]
        assert history[-1]["train_loss"] < history[0]["train_loss"]

    def test_training_curve_logged_per_epoch(self, overfit_run):
        _, cfg, checkpoint = overfit_run
        history = checkpoint.metrics["history"]
        assert len(history) == cfg.epochs
        assert all("valid_macro_f1" in e and "train_loss" in e for e in history)

    def test_seeded_determinism(self, encoder_cfg_module, mmr_cfg_module):
        corpus = rule_corpus(n_train=12, n_valid=6, n_test=6, seed=0)
        cfg = TrainConfig(learning_rate=1e-2, epochs=3, batch_size=8, seed=7)
        a = train(corpus, encoder_cfg_module, mmr_cfg_module, cfg)
        b = train(corpus, encoder_cfg_module, mmr_cfg_module, cfg)
        assert a.metrics["history"] == b.metrics["history"]
        for k, v in a.model.state_dict()["classifier"].items():
            assert torch.equal(v, b.model.state_dict()["classifier"][k])

    def test_zero_epochs_returns_initialized_checkpoint(self, encoder_cfg_module, mmr_cfg_module):
        corpus = rule_corpus(n_train=6, n_valid=6, n_test=6, seed=0)
        cfg = TrainConfig(epochs=0, seed=3)
        checkpoint = train(corpus, encoder_cfg_module, mmr_cfg_module, cfg)
        assert checkpoint.metrics["history"] == []
        assert checkpoint.metrics["best_epoch"] == -1
        assert "macro_f1" in checkpoint.metrics["best"]

    def test_empty_split_rejected(self, encoder_cfg_module, mmr_cfg_module):
        from sgusm.corpus import Corpus

        corpus = rule_corpus(n_train=4, n_valid=4, n_test=4, seed=0)
        empty = Corpus(schema=corpus.schema, train=corpus.train, valid=(), test=corpus.test)
        with pytest.raises(ValueError):
            train(empty, encoder_cfg_module, mmr_cfg_module, TrainConfig(epochs=1))

    def test_importance_constant_within_epoch(self, encoder_cfg_module, mmr_cfg_module):
        corpus = rule_corpus(n_train=12, n_valid=6, n_test=6, seed=0)
        seen = []

        def on_forward(A, S, p):
            seen.append(S.copy())

        cfg = TrainConfig(learning_rate=1e-2, epochs=2, batch_size=4, seed=0)
        train(corpus, encoder_cfg_module, mmr_cfg_module, cfg, on_forward=on_forward)
        per_epoch = len(seen) // 2
        first_epoch = seen[:per_epoch]
        assert all(np.array_equal(first_epoch[0], S) for S in first_epoch)


class TestAblate:
    def test_no_importance_uses_uniform(self, encoder_cfg_module, mmr_cfg_module):
        corpus = rule_corpus(n_train=9, n_valid=6, n_test=6, seed=0)
        cfg = TrainConfig(learning_rate=1e-2, epochs=1, batch_size=8, seed=0)
        checkpoint = ablate(corpus, encoder_cfg_module, mmr_cfg_module, cfg, "w/oImp")
        M = corpus.schema.size
        np.testing.assert_allclose(checkpoint.model.importance, np.full(M, 1 / M))

    def test_no_fulfillment_ignores_dialogue_content(self, encoder_cfg_module, mmr_cfg_module):
        corpus = rule_corpus(n_train=9, n_valid=6, n_test=6, seed=0)
        cfg = TrainConfig(learning_rate=1e-2, epochs=1, batch_size=8, seed=0)
        checkpoint = ablate(corpus, encoder_cfg_module, mmr_cfg_module, cfg, "w/oFul")
        p1 = checkpoint.model.predict_proba(corpus.test[0])
        p2 = checkpoint.model.predict_proba(corpus.test[1])
        np.testing.assert_allclose(p1, p2, atol=1e-7)

    def test_unknown_variant_rejected(self, encoder_cfg_module, mmr_cfg_module):
        corpus = rule_corpus(n_train=4, n_valid=4, n_test=4, seed=0)
        with pytest.raises(ValueError):
            ablate(corpus, encoder_cfg_module, mmr_cfg_module, TrainConfig(), "w/oEverything")


class TestCheckpoint:
    def test_round_trip_reproduces_metrics(self, overfit_run, tmp_path):
        corpus, _, checkpoint = overfit_run
        stored = checkpoint.metrics["best"]["macro_f1"]
        checkpoint.save(tmp_path / "ckpt")
        loaded = Checkpoint.load(tmp_path / "ckpt")
        report = evaluate_model(loaded.model, corpus.valid)
        assert abs(report.macro_f1 - stored) < 1e-6

    def test_round_trip_identical_predictions(self, overfit_run, tmp_path):
        corpus, _, checkpoint = overfit_run
        before = [checkpoint.model.predict_proba(d) for d in corpus.test]
        checkpoint.save(tmp_path / "ckpt2")
        loaded = Checkpoint.load(tmp_path / "ckpt2")
        after = [loaded.model.predict_proba(d) for d in corpus.test]
        for b, a in zip(before, after):
            np.testing.assert_allclose(a, b, atol=1e-6)

    def test_schema_fingerprint_enforced(self, overfit_run, tmp_path):
        import json

        _, _, checkpoint = overfit_run
        path = checkpoint.save(tmp_path / "ckpt3")
        manifest = json.loads((path / "manifest.json").read_text())
        manifest["schema_fingerprint"] = hashlib.sha256(b"other").hexdigest()
        (path / "manifest.json").write_text(json.dumps(manifest))
        with pytest.raises(ValueError):
            Checkpoint.load(path)

    def test_checkpoint_files_present(self, overfit_run, tmp_path):
        _, _, checkpoint = overfit_run
        path = checkpoint.save(tmp_path / "ckpt4")
        for name in ("config.json", "weights.pt", "metrics.json", "importance.json", "manifest.json"):
            assert (path / name).exists()

    def test_config_records_seed(self, overfit_run, tmp_path):
        import json

        _, cfg, checkpoint = overfit_run
        path = checkpoint.save(tmp_path / "ckpt5")
        stored = json.loads((path / "config.json").read_text())
        assert stored["train"]["seed"] == cfg.seed


class TestTrainConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            TrainConfig(learning_rate=0)
        with pytest.raises(ValueError):
            TrainConfig(epochs=-1)
        with pytest.raises(ValueError):
            TrainConfig(variant="bogus")

    def test_round_trip(self):
        cfg = TrainConfig(seed=9, use_unlabeled=True, grad_clip=None)
        assert TrainConfig.from_dict(cfg.to_dict()) == cfg
