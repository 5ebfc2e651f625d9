"""Synthetic corpora with known generating rules.

Used by the test-suite and the demo scripts. Every generator builds
dialogues from a small vocabulary so the deterministic mock encoder can
separate them, and the satisfaction label is a known function of dialogue
content: each dialogue contains exactly one "signal" turn about the signal
attribute's topic, and the class keyword inside that turn determines the
label (awful / okay / great -> dissatisfied / neutral / satisfied).

Distractor turns talk about other attributes' topics and carry random class
keywords, so only the signal attribute's fulfillment representation is
predictive. Placing the signal turn early or late steers the corpus-level
importance estimate toward or away from the signal attribute.
"""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

import numpy as np

from .corpus import Corpus, Dialogue, DialogueTurn, SatisfactionLabel, TaskAttribute, TaskSchema

CLASS_KEYWORDS = ("awful", "okay", "great")
CLASS_TO_RATING = {0: 1, 1: 3, 2: 5}

SIGNAL_TOPIC = ("reservation", "checkout", "confirmation")
DISTRACTOR_TOPICS = (
    ("parking", "garage", "vehicle"),
    ("breakfast", "menu", "kitchen"),
    ("wifi", "network", "password"),
    ("gym", "pool", "sauna"),
    ("music", "lobby", "lighting"),
    ("towels", "laundry", "pillow"),
    ("elevator", "stairs", "hallway"),
    ("balcony", "window", "curtains"),
    ("heating", "thermostat", "radiator"),
    ("shuttle", "airport", "taxi"),
    ("minibar", "snacks", "fridge"),
    ("keycard", "lock", "reception"),
    ("garden", "terrace", "fountain"),
    ("blanket", "mattress", "bedding"),
    ("shampoo", "soap", "mirror"),
)


def make_schema(name: str = "synthetic-hotel", n_distractors: int = 3,
                topic_offset: int = 0) -> TaskSchema:
    """Schema with one signal attribute (index 0) plus distractors.

    ``topic_offset`` rotates which distractor topics are used, to build a
    second schema with different attributes but the same signal topic.
    """
    if n_distractors > len(DISTRACTOR_TOPICS):
        raise ValueError("not enough distractor topics")
    attributes = [TaskAttribute("signal", " ".join(SIGNAL_TOPIC) + " quality")]
    for k in range(n_distractors):
        topic = DISTRACTOR_TOPICS[(topic_offset + k) % len(DISTRACTOR_TOPICS)]
        attributes.append(TaskAttribute(f"distractor_{k}", " ".join(topic) + " service"))
    return TaskSchema(name=name, attributes=tuple(attributes))


def _signal_turn(cls: int, index: int) -> DialogueTurn:
    words = " ".join(SIGNAL_TOPIC)
    return DialogueTurn(
        user_utterance=f"the {words} was {CLASS_KEYWORDS[cls]}",
        system_utterance="understood thanks",
        index=index,
    )


def _noise_turn(schema: TaskSchema, rng: np.random.Generator, index: int) -> DialogueTurn:
    distractors = [a for a in schema.attributes if a.id != "signal"]
    attr = distractors[int(rng.integers(len(distractors)))]
    keyword = CLASS_KEYWORDS[int(rng.integers(3))]
    return DialogueTurn(
        user_utterance=f"{attr.description} seemed {keyword}",
        system_utterance="sure noted",
        index=index,
    )


def make_dialogue(
    schema: TaskSchema,
    dialogue_id: str,
    cls: int,
    rng: np.random.Generator,
    n_turns: int = 4,
    signal_position: str = "early",
    labeled: bool = True,
) -> Dialogue:
    signal_at = 0 if signal_position == "early" else n_turns - 1
    turns = []
    for j in range(n_turns):
        if j == signal_at:
            turns.append(_signal_turn(cls, j + 1))
        else:
            turns.append(_noise_turn(schema, rng, j + 1))
    label = SatisfactionLabel(cls) if labeled else None
    return Dialogue(id=dialogue_id, turns=tuple(turns), label=label)


def _split(schema: TaskSchema, prefix: str, n: int, rng: np.random.Generator,
           signal_position: str, labeled: bool = True, n_turns: int = 4) -> tuple:
    return tuple(
        make_dialogue(schema, f"{prefix}-{i}", i % 3, rng,
                      n_turns=n_turns, signal_position=signal_position, labeled=labeled)
        for i in range(n)
    )


def rule_corpus(
    n_train: int = 30,
    n_valid: int = 15,
    n_test: int = 15,
    n_unlabeled: int = 0,
    seed: int = 0,
    signal_position: str = "early",
    unlabeled_signal_position: str = "early",
    schema: Optional[TaskSchema] = None,
    n_turns: int = 4,
) -> Corpus:
    """Corpus whose label is fully determined by the class keyword in the
    signal attribute's turn."""
    rng = np.random.default_rng(seed)
    schema = schema or make_schema()
    return Corpus(
        schema=schema,
        train=_split(schema, "train", n_train, rng, signal_position, n_turns=n_turns),
        valid=_split(schema, "valid", n_valid, rng, signal_position, n_turns=n_turns),
        test=_split(schema, "test", n_test, rng, signal_position, n_turns=n_turns),
        unlabeled=_split(schema, "unlabeled", n_unlabeled, rng,
                         unlabeled_signal_position, labeled=False, n_turns=n_turns),
    )


def transfer_pair(seed: int = 0) -> Tuple[Corpus, Corpus]:
    """Two corpora sharing the labeling rule but with different schemas.

    The target schema has a different attribute count and different
    distractor topics; only the signal topic is shared, so transfer must run
    through the encoded attribute descriptions.
    """
    source = rule_corpus(n_train=45, n_valid=18, n_test=18, seed=seed)
    target_schema = make_schema(name="synthetic-venue", n_distractors=5, topic_offset=3)
    target = rule_corpus(n_train=9, n_valid=9, n_test=30, seed=seed + 1,
                         schema=target_schema)
    return source, target


def importance_sensitive_corpus(seed: int = 0) -> Corpus:
    """Many-attribute corpus where the label hinges on one of ten attributes.

    With importance estimated, the aggregation concentrates on the signal
    attribute; with uniform importance the gradient spreads over ten
    fulfillment columns, nine of them noise."""
    schema = make_schema(name="synthetic-wide", n_distractors=9)
    return rule_corpus(n_train=45, n_valid=18, n_test=18, seed=seed,
                       schema=schema, n_turns=6)


def semi_supervised_corpus(seed: int = 0, n_unlabeled: int = 400) -> Corpus:
    """Labeled splits hide the signal turn at the end of each dialogue, so the
    labeled-only importance estimate favors distractors; unlabeled dialogues
    put the signal turn first, pulling importance back toward the signal
    attribute as the pool grows."""
    return rule_corpus(
        n_train=24, n_valid=15, n_test=30, n_unlabeled=n_unlabeled, seed=seed,
        signal_position="late", unlabeled_signal_position="early",
    )
