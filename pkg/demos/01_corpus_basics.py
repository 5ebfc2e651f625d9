"""Build a small synthetic corpus, save it to disk, and load it back.

Shows the on-disk layout (schema JSON + JSONL splits), the rating-to-class
mapping, and the schema fingerprint used to guard checkpoints.
"""

import collections
import tempfile
from pathlib import Path

from sgusm.corpus import load_corpus, save_corpus
from sgusm.synthetic import rule_corpus


def main():
    corpus = rule_corpus(n_train=30, n_valid=10, n_test=10, n_unlabeled=20, seed=0)
    print(f"schema: {corpus.schema.name} with {corpus.schema.size} attributes")
    for attr in corpus.schema.attributes:
        print(f"  {attr.id}: {attr.description}")

    with tempfile.TemporaryDirectory() as tmp:
        paths = save_corpus(corpus, Path(tmp) / "data")
        print("\nfiles written:")
        for name, path in paths.items():
            print(f"  {name}: {path.name}")

        reloaded = load_corpus(
            paths["schema"],
            {"train": paths["train"], "valid": paths["valid"], "test": paths["test"]},
            unlabeled_path=paths["unlabeled"],
        )

    counts = collections.Counter(d.label.name for d in reloaded.train)
    print(f"\ntrain label distribution: {dict(counts)}")
    print(f"unlabeled pool size: {len(reloaded.unlabeled)}")
    print(f"schema fingerprint: {reloaded.schema.fingerprint()[:16]}...")

    example = reloaded.train[0]
    print(f"\nfirst dialogue ({example.id}, label={example.label.name}):")
    for turn in example.turns:
        print(f"  turn {turn.index}: user={turn.user_utterance!r}")


if __name__ == "__main__":
    main()
