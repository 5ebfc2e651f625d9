import json

import numpy as np
import pytest

from sgusm.corpus import Dialogue, DialogueTurn, SatisfactionLabel, TaskAttribute, TaskSchema
from sgusm.encoder import EncoderConfig
from sgusm.importance import MMRConfig
from sgusm.trainer import TrainConfig

H = 32  # hidden size used by mock-encoder tests


@pytest.fixture
def encoder_cfg():
    return EncoderConfig(backend="mock", hidden_size=H)


@pytest.fixture
def mmr_cfg():
    return MMRConfig(top_k=1, lambda_=0.5)


@pytest.fixture
def fast_train_cfg():
    return TrainConfig(learning_rate=1e-2, epochs=8, batch_size=16, seed=0)


@pytest.fixture
def tiny_schema():
    return TaskSchema(
        name="tiny",
        attributes=(
            TaskAttribute("location", "the location of the hotel"),
            TaskAttribute("price", "the nightly price range"),
            TaskAttribute("parking", "availability of on site parking"),
        ),
    )


def make_turns(texts):
    return tuple(
        DialogueTurn(user_utterance=u, system_utterance=s, index=j + 1)
        for j, (u, s) in enumerate(texts)
    )


@pytest.fixture
def tiny_dialogue():
    return Dialogue(
        id="d1",
        turns=make_turns([
            ("i need a cheap hotel downtown", "sure what area"),
            ("somewhere near the station", "found three options"),
            ("does it have parking", "yes free parking"),
        ]),
        label=SatisfactionLabel.SATISFIED,
    )


def write_corpus_files(tmp_path, schema_dict, splits):
    """Write schema.json plus JSONL splits; returns the path map."""
    tmp_path.mkdir(parents=True, exist_ok=True)
    paths = {}
    schema_path = tmp_path / "schema.json"
    schema_path.write_text(json.dumps(schema_dict), encoding="utf-8")
    paths["schema"] = schema_path
    for name, records in splits.items():
        p = tmp_path / f"{name}.jsonl"
        p.write_text("\n".join(json.dumps(r) for r in records) + "\n", encoding="utf-8")
        paths[name] = p
    return paths


def rng_matrix(rng, rows, cols):
    return rng.standard_normal((rows, cols))
