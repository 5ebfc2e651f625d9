import hashlib

import numpy as np
import pytest

from sgusm.corpus import Dialogue, DialogueTurn, TaskAttribute, TaskSchema
from sgusm.encoder import (
    EncoderConfig,
    EncodingError,
    MockEncoder,
    encode_attributes,
    encode_dialogue,
    encode_turn,
)

from conftest import H, make_turns


def mock_oracle(text, hidden_size, max_tokens=512):
    """Independent restatement of the mock encoder rule: per whitespace token,
    seed a generator with the first 8 bytes of sha256(token) and draw a
    standard normal vector; mean-pool over the first max_tokens tokens."""
    vecs = []
    for token in text.split()[:max_tokens]:
        seed = int.from_bytes(hashlib.sha256(token.encode()).digest()[:8], "big")
        vecs.append(np.random.default_rng(seed).standard_normal(hidden_size))
    return np.mean(vecs, axis=0)


class TestMockEncoder:
    def test_matches_hash_oracle(self, encoder_cfg):
        turn = DialogueTurn("i want a cheap room", "sure thing", 1)
        vec = encode_turn(turn, encoder_cfg)
        expected = mock_oracle("i want a cheap room sure thing", H)
        np.testing.assert_array_equal(vec, expected)

    def test_attribute_row_matches_oracle(self, encoder_cfg, tiny_schema):
        T = encode_attributes(tiny_schema, encoder_cfg)
        for i, attr in enumerate(tiny_schema.attributes):
            np.testing.assert_array_equal(T[i], mock_oracle(attr.description, H))

    def test_deterministic_across_instances(self, encoder_cfg):
        turn = DialogueTurn("hello there", "general greeting", 1)
        a = encode_turn(turn, encoder_cfg, encoder=MockEncoder(encoder_cfg))
        b = encode_turn(turn, encoder_cfg, encoder=MockEncoder(encoder_cfg))
        np.testing.assert_array_equal(a, b)

    def test_truncation_keeps_leading_tokens(self):
        cfg = EncoderConfig(backend="mock", hidden_size=H, max_tokens=3)
        long_turn = DialogueTurn("a b c d e f g", "", 1)
        short_turn = DialogueTurn("a b c", "", 1)
        np.testing.assert_array_equal(encode_turn(long_turn, cfg), encode_turn(short_turn, cfg))

    def test_empty_turn_rejected(self, encoder_cfg):
        with pytest.raises(EncodingError):
            encode_turn(DialogueTurn("   ", "", 1), encoder_cfg)


class TestShapes:
    def test_dialogue_matrix_shape_and_rows(self, encoder_cfg, tiny_dialogue):
        D = encode_dialogue(tiny_dialogue, encoder_cfg)
        assert D.shape == (3, H)
        assert np.isfinite(D).all()
        for j, turn in enumerate(tiny_dialogue.turns):
            np.testing.assert_array_equal(D[j], encode_turn(turn, encoder_cfg))

    def test_single_turn_dialogue(self, encoder_cfg):
        d = Dialogue(id="d", turns=make_turns([("only turn", "reply")]))
        D = encode_dialogue(d, encoder_cfg)
        assert D.shape == (1, H)
        np.testing.assert_array_equal(D[0], encode_turn(d.turns[0], encoder_cfg))

    def test_many_turn_dialogue(self, encoder_cfg):
        texts = [(f"user turn {j}", f"system turn {j}") for j in range(23)]
        d = Dialogue(id="long", turns=make_turns(texts))
        assert encode_dialogue(d, encoder_cfg).shape == (23, H)

    def test_attribute_matrix_shape(self, encoder_cfg):
        schema = TaskSchema("wide", tuple(
            TaskAttribute(f"a{i}", f"attribute number {i}") for i in range(37)
        ))
        assert encode_attributes(schema, encoder_cfg).shape == (37, H)

    def test_permuting_turns_permutes_rows_only(self, encoder_cfg):
        texts = [("first turn", "r1"), ("second turn", "r2"), ("third turn", "r3")]
        d1 = Dialogue(id="a", turns=make_turns(texts))
        d2 = Dialogue(id="b", turns=make_turns([texts[1], texts[0], texts[2]]))
        D1, D2 = encode_dialogue(d1, encoder_cfg), encode_dialogue(d2, encoder_cfg)
        np.testing.assert_array_equal(D1[[1, 0, 2]], D2)
        np.testing.assert_array_equal(D1[2], D2[2])

    def test_identical_descriptions_identical_rows(self, encoder_cfg):
        schema = TaskSchema("dup", (
            TaskAttribute("x", "same words here"),
            TaskAttribute("y", "same words here"),
        ))
        T = encode_attributes(schema, encoder_cfg)
        np.testing.assert_array_equal(T[0], T[1])


class TestConfig:
    def test_unknown_backend_rejected(self):
        with pytest.raises(ValueError):
            EncoderConfig(backend="elmo")

    def test_nonpositive_sizes_rejected(self):
        with pytest.raises(ValueError):
            EncoderConfig(hidden_size=0)
        with pytest.raises(ValueError):
            EncoderConfig(max_tokens=0)

    def test_config_round_trip(self, encoder_cfg):
        assert EncoderConfig.from_dict(encoder_cfg.to_dict()) == encoder_cfg
