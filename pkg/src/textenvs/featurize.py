"""Word-vector store and the default observation featurizers for all tasks.

Embeddings live in plain whitespace text files (one token per line, values
space-separated, optional ``count dim`` header). Out-of-vocabulary tokens are
resolved by the store's policy: ``zeros`` yields the zero vector,
``hash_bucket`` a deterministic unit vector derived from a seeded hash, so
synthetic corpora need no embedding file at all.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from typing import IO, Iterable, NamedTuple, Sequence

import numpy as np

from .core import DimensionMismatch, ParseError, UnknownLabel

START_LABEL = "<START>"
DEFAULT_DIM = 64

_TOKEN_RE = re.compile(r"\w+|[^\w\s]", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Whitespace plus punctuation splitting; punctuation marks become tokens."""
    return _TOKEN_RE.findall(text)


class Segment(NamedTuple):
    name: str
    offset: int
    length: int


@dataclass(frozen=True)
class FeatureVector:
    """A flat float vector plus the named layout of its segments."""

    values: np.ndarray
    layout: tuple[Segment, ...]

    def __len__(self) -> int:
        return len(self.values)

    def segment(self, name: str) -> np.ndarray:
        for seg in self.layout:
            if seg.name == name:
                return self.values[seg.offset : seg.offset + seg.length]
        raise KeyError(name)


def _concat(*parts: tuple[str, np.ndarray]) -> FeatureVector:
    layout = []
    offset = 0
    arrays = []
    for name, arr in parts:
        layout.append(Segment(name, offset, len(arr)))
        offset += len(arr)
        arrays.append(arr)
    return FeatureVector(np.concatenate(arrays), tuple(layout))


class EmbeddingStore:
    """Immutable token -> vector table; lookups always yield a d-vector."""

    def __init__(
        self,
        dimension: int,
        table: dict[str, np.ndarray] | None = None,
        oov_policy: str = "zeros",
        seed: int = 0,
    ):
        if oov_policy not in ("zeros", "hash_bucket"):
            raise ValueError(f"unknown oov policy {oov_policy!r}")
        self.dimension = int(dimension)
        self.table = dict(table or {})
        self.oov_policy = oov_policy
        self.seed = int(seed)

    def __contains__(self, token: str) -> bool:
        return token in self.table

    def __len__(self) -> int:
        return len(self.table)

    def _hash_vector(self, token: str) -> np.ndarray:
        digest = hashlib.sha256(token.encode("utf-8")).digest()
        rng = np.random.default_rng([self.seed, int.from_bytes(digest[:8], "little")])
        vec = rng.standard_normal(self.dimension)
        norm = np.linalg.norm(vec)
        return vec / norm if norm > 0 else vec

    def embed(self, token: str) -> np.ndarray:
        """Stored vector, lowercased fallback, then the OOV policy."""
        hit = self.table.get(token)
        if hit is None:
            hit = self.table.get(token.lower())
        if hit is not None:
            return hit
        if self.oov_policy == "zeros":
            return np.zeros(self.dimension)
        return self._hash_vector(token)

    def pool(self, tokens: Sequence[str]) -> np.ndarray:
        """Mean of the token vectors; the empty list pools to the zero vector."""
        if not tokens:
            return np.zeros(self.dimension)
        return np.mean([self.embed(t) for t in tokens], axis=0)

    def pool_text(self, text: str) -> np.ndarray:
        return self.pool(tokenize(text))


def hash_store(dimension: int = DEFAULT_DIM, seed: int = 0) -> EmbeddingStore:
    """Store with no table at all; every token hashes to a stable unit vector."""
    return EmbeddingStore(dimension, {}, oov_policy="hash_bucket", seed=seed)


def load_embeddings(
    source: IO[str] | Iterable[str], oov_policy: str = "zeros", seed: int = 0
) -> EmbeddingStore:
    """Parse a text embedding file; duplicates keep the first occurrence."""
    table: dict[str, np.ndarray] = {}
    dimension: int | None = None
    for lineno, raw in enumerate(source, start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            continue
        fields = line.split()
        if lineno == 1 and len(fields) == 2:
            try:
                int(fields[0]), int(fields[1])
                continue  # "count dim" header
            except ValueError:
                pass
        token, values = fields[0], fields[1:]
        if not values:
            raise ParseError(f"no vector values for token {token!r}", lineno)
        try:
            vec = np.array([float(v) for v in values])
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
        if dimension is None:
            dimension = len(vec)
        elif len(vec) != dimension:
            raise DimensionMismatch(
                f"line {lineno}: vector of length {len(vec)}, expected {dimension}"
            )
        table.setdefault(token, vec)
    if dimension is None:
        raise ParseError("embedding file holds no vectors", None)
    return EmbeddingStore(dimension, table, oov_policy=oov_policy, seed=seed)


def save_embeddings(store: EmbeddingStore, sink: IO[str], header: bool = True) -> None:
    if header:
        sink.write(f"{len(store.table)} {store.dimension}\n")
    for token, vec in store.table.items():
        sink.write(token + " " + " ".join(repr(float(v)) for v in vec) + "\n")


def one_hot(vocab: Sequence[str], label: str) -> np.ndarray:
    """Indicator over ``vocab`` plus one trailing slot for the START sentinel."""
    vec = np.zeros(len(vocab) + 1)
    if label == START_LABEL:
        vec[-1] = 1.0
        return vec
    try:
        vec[list(vocab).index(label)] = 1.0
    except ValueError:
        raise UnknownLabel(f"{label!r} not in vocabulary {list(vocab)}") from None
    return vec


def bow_labels(vocab: Sequence[str], labels: Iterable[str]) -> np.ndarray:
    """Binary presence vector over ``vocab`` (duplicates collapse)."""
    vocab = list(vocab)
    vec = np.zeros(len(vocab))
    for label in labels:
        try:
            vec[vocab.index(label)] = 1.0
        except ValueError:
            raise UnknownLabel(f"{label!r} not in vocabulary {vocab}") from None
    return vec


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity; any zero vector yields 0.0 rather than NaN."""
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


def featurize_seqtag(
    store: EmbeddingStore, vocab: Sequence[str], current_word: str, prev_label: str
) -> FeatureVector:
    """[word vector: d][previous-label one-hot: |vocab|+1]."""
    return _concat(
        ("word", store.embed(current_word)),
        ("prev_label", one_hot(vocab, prev_label)),
    )


def featurize_mlc(
    store: EmbeddingStore, vocab: Sequence[str], sentence: str, labels_so_far: Sequence[str]
) -> FeatureVector:
    """[mean-pooled sentence: d][emitted-label bag-of-words: |vocab|]."""
    return _concat(
        ("sentence", store.pool_text(sentence)),
        ("labels", bow_labels(vocab, labels_so_far)),
    )


def featurize_qa_simple(
    store: EmbeddingStore, question: str, choice: str, facts: Sequence[str]
) -> FeatureVector:
    """[question: d][choice: d][facts: d]; facts are pooled jointly."""
    return _concat(
        ("question", store.pool_text(question)),
        ("choice", store.pool_text(choice)),
        ("facts", store.pool_text(" ".join(facts))),
    )


def featurize_qa_informed(
    store: EmbeddingStore, question: str, choice: str, facts: Sequence[str]
) -> FeatureVector:
    """2-D: cosine(choice, question) and cosine(choice, pooled facts)."""
    choice_vec = store.pool_text(choice)
    values = np.array(
        [
            cosine(choice_vec, store.pool_text(question)),
            cosine(choice_vec, store.pool_text(" ".join(facts))),
        ]
    )
    return FeatureVector(values, (Segment("cos_question", 0, 1), Segment("cos_facts", 1, 1)))
