"""Schema-guided user satisfaction modeling for task-oriented dialogues.

Predicts a three-class satisfaction label for a dialogue by combining
per-attribute fulfillment representations (bilinear attention over dialogue
turns) with corpus-level attribute importance (MMR selection, positional
discounting, softmax over discounted presence sums).
"""

from .corpus import (
    Corpus,
    CorpusError,
    Dialogue,
    DialogueTurn,
    SatisfactionLabel,
    TaskAttribute,
    TaskSchema,
    load_corpus,
    map_rating,
)
from .encoder import EncoderConfig, encode_attributes, encode_dialogue, encode_turn
from .evaluation import MetricsReport, compute_metrics, evaluate_model, transfer_evaluate, unlabeled_scaling
from .importance import MMRConfig, discount, importance_scores, mmr_select, presence_vector
from .model import Model
from .predictor import SatisfactionClassifier, aggregate
from .trainer import Checkpoint, TrainConfig, ablate, nll_loss, train

__version__ = "0.1.0"
