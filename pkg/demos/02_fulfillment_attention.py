"""Peek inside the bilinear attention layer.

Encodes one dialogue and its task schema, then prints the attention
distribution each attribute places over the dialogue turns and the
resulting fulfillment representations.
"""

import numpy as np
import torch

from sgusm.encoder import EncoderConfig, EncoderPair, encode_attributes, encode_dialogue
from sgusm.fulfillment import FulfillmentLayer
from sgusm.synthetic import rule_corpus


def main():
    torch.manual_seed(0)
    corpus = rule_corpus(n_train=4, n_valid=2, n_test=2, seed=0)
    dialogue = corpus.train[0]

    enc_cfg = EncoderConfig(backend="mock", hidden_size=32)
    pair = EncoderPair(enc_cfg)
    D = torch.tensor(encode_dialogue(dialogue, enc_cfg, encoder=pair.turn_encoder),
                     dtype=torch.float32)
    T = torch.tensor(encode_attributes(corpus.schema, enc_cfg,
                                       encoder=pair.attribute_encoder),
                     dtype=torch.float32)
    print(f"turn embeddings D: {tuple(D.shape)}, attribute embeddings T: {tuple(T.shape)}")

    layer = FulfillmentLayer(hidden_size=32)
    with torch.no_grad():
        fulfillment, attention = layer(D, T)

    print("\nattention over turns (rows sum to 1):")
    for attr, row in zip(corpus.schema.attributes, attention):
        weights = "  ".join(f"{w:.3f}" for w in row)
        print(f"  {attr.id:>14s}: {weights}")

    print(f"\nfulfillment representations: {tuple(fulfillment.shape)}")
    norms = np.linalg.norm(fulfillment.numpy(), axis=1)
    print("per-attribute norms:", "  ".join(f"{n:.2f}" for n in norms))


if __name__ == "__main__":
    main()
