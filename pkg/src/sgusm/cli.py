"""Command-line entry point.

Subcommands: train, evaluate, importance, ablate (train with a forced
variant), transfer (evaluate against a different schema), scale (unlabeled
pool sweep). Run configs are JSON files; command-line flags override config
values, and the SGUSM_SEED environment variable overrides the config seed
(an explicit --seed flag wins over both).

Exit codes: 0 success, 1 usage/config error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .corpus import Corpus, CorpusError, load_corpus, load_dialogues, load_schema
from .encoder import EncoderConfig
from .evaluation import transfer_evaluate, unlabeled_scaling
from .importance import MMRConfig, importance_report, importance_scores
from .trainer import Checkpoint, FORMAT_VERSION, TrainConfig, ablate, train

logger = logging.getLogger(__name__)


@dataclass
class RunConfig:
    schema: str
    train: str
    valid: str
    test: str
    unlabeled: Optional[str]
    output_dir: str
    encoder: EncoderConfig
    mmr: MMRConfig
    train_config: TrainConfig

    def to_dict(self) -> dict:
        return {
            "schema": self.schema,
            "train": self.train,
            "valid": self.valid,
            "test": self.test,
            "unlabeled": self.unlabeled,
            "output_dir": self.output_dir,
            "encoder": self.encoder.to_dict(),
            "mmr": self.mmr.to_dict(),
            "train_config": self.train_config.to_dict(),
        }


def load_run_config(path, overrides: Optional[dict] = None) -> RunConfig:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    overrides = overrides or {}
    train_cfg = dict(raw.get("train_config", {}))
    if "SGUSM_SEED" in os.environ:
        train_cfg["seed"] = int(os.environ["SGUSM_SEED"])
    for key in ("seed", "epochs", "variant", "use_unlabeled", "learning_rate", "batch_size"):
        if overrides.get(key) is not None:
            train_cfg[key] = overrides[key]
    if "variant" in train_cfg:
        from .model import VARIANT_ALIASES

        train_cfg["variant"] = VARIANT_ALIASES.get(train_cfg["variant"], train_cfg["variant"])
    for key in ("schema", "train", "valid", "test", "unlabeled", "output_dir"):
        if overrides.get(key) is not None:
            raw[key] = overrides[key]
    missing = [k for k in ("schema", "train", "valid", "test", "output_dir") if k not in raw]
    if missing:
        raise CorpusError(f"run config missing keys: {missing}")
    return RunConfig(
        schema=raw["schema"],
        train=raw["train"],
        valid=raw["valid"],
        test=raw["test"],
        unlabeled=raw.get("unlabeled"),
        output_dir=raw["output_dir"],
        encoder=EncoderConfig.from_dict(raw.get("encoder", {})),
        mmr=MMRConfig.from_dict(raw.get("mmr", {})),
        train_config=TrainConfig.from_dict(train_cfg),
    )


def _load_corpus(cfg: RunConfig) -> Corpus:
    return load_corpus(
        cfg.schema,
        {"train": cfg.train, "valid": cfg.valid, "test": cfg.test},
        unlabeled_path=cfg.unlabeled,
    )


def _write_artifact(path: Path, payload: dict, run_config: RunConfig):
    wrapped = {
        "format_version": FORMAT_VERSION,
        "run_config": run_config.to_dict(),
        **payload,
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(wrapped, indent=2, sort_keys=True), encoding="utf-8")


def cmd_train(args) -> int:
    cfg = load_run_config(args.config, vars(args))
    corpus = _load_corpus(cfg)
    variant = args.variant
    if variant is not None:
        checkpoint = ablate(corpus, cfg.encoder, cfg.mmr, cfg.train_config, variant)
    else:
        checkpoint = train(corpus, cfg.encoder, cfg.mmr, cfg.train_config)
    out = Path(cfg.output_dir)
    checkpoint.save(out / "checkpoint")
    _write_artifact(out / "train_metrics.json", {"metrics": checkpoint.metrics}, cfg)
    print(f"checkpoint written to {out / 'checkpoint'}")
    print(f"best valid macro-F1: {checkpoint.metrics['best']['macro_f1']:.4f}")
    return 0


def cmd_evaluate(args) -> int:
    checkpoint = Checkpoint.load(args.checkpoint)
    dialogues = tuple(load_dialogues(args.split, labeled=True))
    if args.transfer:
        if not args.schema:
            print("--transfer requires --schema", file=sys.stderr)
            return 1
        target_schema = load_schema(args.schema)
        target = Corpus(schema=target_schema, test=dialogues)
        report = transfer_evaluate(checkpoint.model, target, split="test")
    else:
        from .evaluation import evaluate_model

        report = evaluate_model(checkpoint.model, dialogues)
    payload = {"report": report.to_dict(), "split": str(args.split),
               "transfer": bool(args.transfer)}
    out = Path(args.output or (Path(args.checkpoint) / "eval_report.json"))
    out.parent.mkdir(parents=True, exist_ok=True)
    config = json.loads((Path(args.checkpoint) / "config.json").read_text(encoding="utf-8"))
    out.write_text(
        json.dumps({"format_version": FORMAT_VERSION, "run_config": config, **payload},
                   indent=2, sort_keys=True),
        encoding="utf-8",
    )
    if args.csv:
        Path(args.csv).write_text(
            "accuracy,macro_precision,macro_recall,macro_f1\n" + report.csv_row() + "\n",
            encoding="utf-8",
        )
    print(f"accuracy={report.accuracy:.4f} macro_f1={report.macro_f1:.4f}")
    return 0


def cmd_importance(args) -> int:
    cfg = load_run_config(args.config, vars(args))
    corpus = _load_corpus(cfg)
    S = importance_scores(
        corpus, cfg.encoder, cfg.mmr,
        use_unlabeled=cfg.train_config.use_unlabeled,
        pool_size=cfg.train_config.unlabeled_pool_size,
    )
    report = importance_report(corpus.schema, S)
    out = Path(args.output or (Path(cfg.output_dir) / "importance.json"))
    _write_artifact(out, {"scores": report}, cfg)
    for rec in report[: args.top]:
        print(f"{rec['rank']:3d}  {rec['score']:.6f}  {rec['attribute_id']}")
    return 0


def cmd_scale(args) -> int:
    cfg = load_run_config(args.config, vars(args))
    corpus = _load_corpus(cfg)
    pool_sizes = [int(x) for x in args.pools.split(",")]
    results = unlabeled_scaling(corpus, cfg.encoder, cfg.mmr, cfg.train_config, pool_sizes)
    payload = {
        "results": [{"pool_size": size, "report": rep.to_dict()} for size, rep in results]
    }
    out = Path(args.output or (Path(cfg.output_dir) / "scaling_report.json"))
    _write_artifact(out, payload, cfg)
    for size, rep in results:
        print(f"pool={size:6d}  macro_f1={rep.macro_f1:.4f}  accuracy={rep.accuracy:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sgusm",
                                     description="Schema-guided user satisfaction modeling")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_args(p):
        p.add_argument("config", help="run config JSON file")
        p.add_argument("--seed", type=int)
        p.add_argument("--epochs", type=int)
        p.add_argument("--output-dir", dest="output_dir")
        p.add_argument("--use-unlabeled", dest="use_unlabeled", action="store_true",
                       default=None)

    p_train = sub.add_parser("train", help="train a model and write a checkpoint")
    add_config_args(p_train)
    p_train.add_argument("--variant", choices=["full", "w/oImp", "w/oFul"], default=None)
    p_train.set_defaults(func=cmd_train)

    p_ablate = sub.add_parser("ablate", help="train an ablated variant")
    add_config_args(p_ablate)
    p_ablate.add_argument("--variant", choices=["w/oImp", "w/oFul"], required=True)
    p_ablate.set_defaults(func=cmd_train)

    p_eval = sub.add_parser("evaluate", help="evaluate a checkpoint on a labeled split")
    p_eval.add_argument("checkpoint", help="checkpoint directory")
    p_eval.add_argument("split", help="labeled dialogue JSONL file")
    p_eval.add_argument("--transfer", action="store_true",
                        help="zero-shot transfer to a different schema")
    p_eval.add_argument("--schema", help="target schema JSON (transfer only)")
    p_eval.add_argument("--output", help="metrics JSON path")
    p_eval.add_argument("--csv", help="also write a one-row CSV of headline metrics")
    p_eval.set_defaults(func=cmd_evaluate)

    p_transfer = sub.add_parser("transfer", help="zero-shot transfer evaluation")
    p_transfer.add_argument("checkpoint")
    p_transfer.add_argument("split")
    p_transfer.add_argument("--schema", required=True)
    p_transfer.add_argument("--output")
    p_transfer.add_argument("--csv")
    p_transfer.set_defaults(func=cmd_evaluate, transfer=True)

    p_imp = sub.add_parser("importance", help="compute and rank attribute importance")
    add_config_args(p_imp)
    p_imp.add_argument("--output", help="importance JSON path")
    p_imp.add_argument("--top", type=int, default=10, help="rows to print")
    p_imp.set_defaults(func=cmd_importance, variant=None)

    p_scale = sub.add_parser("scale", help="unlabeled-pool scaling sweep")
    add_config_args(p_scale)
    p_scale.add_argument("--pools", default="0,100,200,400",
                         help="comma-separated nested pool sizes")
    p_scale.add_argument("--output")
    p_scale.set_defaults(func=cmd_scale, variant=None)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if getattr(args, "transfer", False) and not args.schema:
        print("transfer evaluation requires --schema", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except (CorpusError, FileNotFoundError, json.JSONDecodeError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except Exception as e:  # runtime failure
        logger.exception("runtime failure")
        print(f"runtime failure: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
