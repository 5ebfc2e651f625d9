"""Corpus-level attribute importance via maximal marginal relevance.

Each turn votes for a diverse set of relevant attributes; votes are
discounted by turn position (later mentions matter more via 1/ln(j+1)
on the presence indicators) and normalized with a softmax. The demo
prints the ranked scores with and without an unlabeled pool.
"""

from sgusm.encoder import EncoderConfig
from sgusm.importance import MMRConfig, importance_report, importance_scores
from sgusm.synthetic import semi_supervised_corpus


def show(title, schema, S):
    print(title)
    for rec in importance_report(schema, S):
        print(f"  {rec['rank']:2d}. {rec['attribute_id']:>14s}  {rec['score']:.4f}")


def main():
    corpus = semi_supervised_corpus(seed=0, n_unlabeled=200)
    enc_cfg = EncoderConfig(backend="mock", hidden_size=32)
    mmr_cfg = MMRConfig(top_k=1, lambda_=0.5)

    S_labeled = importance_scores(corpus, enc_cfg, mmr_cfg, use_unlabeled=False)
    show("labeled pool only:", corpus.schema, S_labeled)

    S_semi = importance_scores(corpus, enc_cfg, mmr_cfg,
                               use_unlabeled=True, pool_size=200)
    show("\nwith 200 unlabeled dialogues:", corpus.schema, S_semi)

    print("\nimportance is computed from dialogue text alone, so any unlabeled")
    print("dialogue over the same schema sharpens the estimate for free.")


if __name__ == "__main__":
    main()
