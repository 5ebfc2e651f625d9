"""Data model and ingestion for task schemas and dialogue corpora.

A task schema is a named, ordered list of attributes with natural-language
descriptions. Dialogues are ordered (user, system) utterance pairs with an
optional dialogue-level satisfaction label derived from a 1-5 rating.
Attribute order is load order and is stable: attribute i keeps index i for
the lifetime of the schema object and across reloads of the same file.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional


class CorpusError(ValueError):
    """Raised for malformed schema or dialogue files.

    ``location`` carries a file:line locator when one is known.
    """

    def __init__(self, message: str, location: Optional[str] = None):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class SatisfactionLabel(enum.IntEnum):
    DISSATISFIED = 0
    NEUTRAL = 1
    SATISFIED = 2


def map_rating(rating: int, dialogue_id: str = "?") -> SatisfactionLabel:
    """Map a raw 1-5 rating to the three-class label (below 3 / 3 / above 3)."""
    if not isinstance(rating, int) or isinstance(rating, bool) or not 1 <= rating <= 5:
        raise CorpusError(f"dialogue {dialogue_id!r}: rating must be an integer in 1..5, got {rating!r}")
    if rating < 3:
        return SatisfactionLabel.DISSATISFIED
    if rating == 3:
        return SatisfactionLabel.NEUTRAL
    return SatisfactionLabel.SATISFIED


@dataclass(frozen=True)
class TaskAttribute:
    id: str
    description: str

    def __post_init__(self):
        if not self.description.strip():
            raise CorpusError(f"attribute {self.id!r}: description is empty")


@dataclass(frozen=True)
class TaskSchema:
    name: str
    attributes: tuple  # tuple[TaskAttribute, ...]; order defines attribute indices

    def __post_init__(self):
        if len(self.attributes) == 0:
            raise CorpusError(f"schema {self.name!r}: needs at least one attribute")
        ids = [a.id for a in self.attributes]
        if len(set(ids)) != len(ids):
            dup = next(i for i in ids if ids.count(i) > 1)
            raise CorpusError(f"schema {self.name!r}: duplicate attribute id {dup!r}")

    @property
    def size(self) -> int:
        return len(self.attributes)

    def index_of(self) -> Dict[str, int]:
        return {a.id: i for i, a in enumerate(self.attributes)}

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "attributes": [{"id": a.id, "description": a.description} for a in self.attributes],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TaskSchema":
        return cls(
            name=d["name"],
            attributes=tuple(TaskAttribute(a["id"], a["description"]) for a in d["attributes"]),
        )

    def fingerprint(self) -> str:
        import hashlib

        canonical = json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class DialogueTurn:
    user_utterance: str
    system_utterance: str  # may be empty for a trailing unanswered user turn
    index: int  # 1-based position in the dialogue

    def text(self) -> str:
        return (self.user_utterance + " " + self.system_utterance).strip()


@dataclass(frozen=True)
class Dialogue:
    id: str
    turns: tuple  # tuple[DialogueTurn, ...]
    label: Optional[SatisfactionLabel] = None

    def __post_init__(self):
        if len(self.turns) == 0:
            raise CorpusError(f"dialogue {self.id!r}: has no turns")
        for j, turn in enumerate(self.turns, start=1):
            if turn.index != j:
                raise CorpusError(
                    f"dialogue {self.id!r}: turn index {turn.index} at position {j}, expected {j}"
                )

    @property
    def num_turns(self) -> int:
        return len(self.turns)

    def to_dict(self) -> dict:
        rating = None
        if self.label is not None:
            # Round-trip rating: one canonical rating per class.
            rating = {0: 1, 1: 3, 2: 5}[int(self.label)]
        return {
            "id": self.id,
            "turns": [{"user": t.user_utterance, "system": t.system_utterance} for t in self.turns],
            "rating": rating,
        }


@dataclass(frozen=True)
class Corpus:
    """A schema plus labeled splits and an optional unlabeled pool.

    The dialogue set used for importance estimation is the train split plus
    whatever portion of the unlabeled pool a run enables.
    """

    schema: TaskSchema
    train: tuple = ()
    valid: tuple = ()
    test: tuple = ()
    unlabeled: tuple = ()

    def split(self, name: str) -> tuple:
        try:
            return {"train": self.train, "valid": self.valid, "test": self.test}[name]
        except KeyError:
            raise CorpusError(f"unknown split {name!r}") from None

    def importance_pool(self, use_unlabeled: bool, pool_size: Optional[int] = None) -> List[Dialogue]:
        """Dialogues feeding importance estimation: train split plus unlabeled pool.

        ``pool_size`` takes a nested prefix of the unlabeled pool; None means all.
        """
        pool = list(self.train)
        if use_unlabeled:
            extra = self.unlabeled if pool_size is None else self.unlabeled[:pool_size]
            if pool_size is not None and pool_size > len(self.unlabeled):
                raise CorpusError(
                    f"requested unlabeled pool of {pool_size} but only {len(self.unlabeled)} available"
                )
            pool.extend(extra)
        return pool


def load_schema(path) -> TaskSchema:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise CorpusError(f"schema file not found: {path}")
    except json.JSONDecodeError as e:
        raise CorpusError(f"invalid JSON: {e}", location=f"{path}:{e.lineno}")
    try:
        return TaskSchema.from_dict(raw)
    except (KeyError, TypeError) as e:
        raise CorpusError(f"malformed schema object: {e}", location=str(path))


def load_dialogues(path, labeled: bool) -> List[Dialogue]:
    """Parse a JSONL dialogue file.

    ``labeled=True`` requires a non-null rating on every record; ``labeled=False``
    drops any label (records may carry rating null).
    """
    path = Path(path)
    dialogues: List[Dialogue] = []
    seen_ids = set()
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except FileNotFoundError:
        raise CorpusError(f"dialogue file not found: {path}")
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        loc = f"{path}:{lineno}"
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as e:
            raise CorpusError(f"invalid JSON: {e.msg}", location=loc)
        try:
            did = rec["id"]
            raw_turns = rec["turns"]
        except (KeyError, TypeError) as e:
            raise CorpusError(f"missing field: {e}", location=loc)
        if did in seen_ids:
            raise CorpusError(f"duplicate dialogue id {did!r}", location=loc)
        seen_ids.add(did)
        rating = rec.get("rating")
        if labeled and rating is None:
            raise CorpusError(f"dialogue {did!r}: labeled split requires a rating", location=loc)
        label = None
        if labeled:
            try:
                label = map_rating(rating, dialogue_id=did)
            except CorpusError as e:
                raise CorpusError(str(e), location=loc) from None
        turns = tuple(
            DialogueTurn(
                user_utterance=t.get("user", ""),
                system_utterance=t.get("system", ""),
                index=j,
            )
            for j, t in enumerate(raw_turns, start=1)
        )
        try:
            dialogues.append(Dialogue(id=did, turns=turns, label=label))
        except CorpusError as e:
            raise CorpusError(str(e), location=loc) from None
    return dialogues


def load_corpus(
    schema_path,
    labeled_paths: Dict[str, str],
    unlabeled_path=None,
) -> Corpus:
    """Load and validate a full corpus.

    ``labeled_paths`` maps split names (train/valid/test) to JSONL files; all
    three are required. ``unlabeled_path`` is optional.
    """
    schema = load_schema(schema_path)
    splits = {}
    for name in ("train", "valid", "test"):
        if name not in labeled_paths:
            raise CorpusError(f"missing required split {name!r}")
        splits[name] = tuple(load_dialogues(labeled_paths[name], labeled=True))
    unlabeled = ()
    if unlabeled_path is not None:
        unlabeled = tuple(load_dialogues(unlabeled_path, labeled=False))
    return Corpus(schema=schema, unlabeled=unlabeled, **splits)


def save_corpus(corpus: Corpus, directory) -> Dict[str, Path]:
    """Write a corpus back to disk in the load format. Returns the written paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = {"schema": directory / "schema.json"}
    paths["schema"].write_text(
        json.dumps(corpus.schema.to_dict(), ensure_ascii=False, indent=2), encoding="utf-8"
    )
    for name in ("train", "valid", "test", "unlabeled"):
        p = directory / f"{name}.jsonl"
        records = [d.to_dict() for d in getattr(corpus, name)]
        p.write_text("\n".join(json.dumps(r, ensure_ascii=False) for r in records) + ("\n" if records else ""), encoding="utf-8")
        paths[name] = p
    return paths
