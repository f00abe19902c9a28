"""Corpus parsers, serializers, and seeded synthetic corpus generators.

Three on-disk formats are supported: CoNLL-style column text for tagging,
and JSONL (one UTF-8 object per line) for question answering and multi-label
classification. The synthetic generators produce solvable desk-scale corpora:
a hand-written non-learning oracle reaches a perfect score on each of them,
which is the ceiling agents are benchmarked against.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import IO, Iterable

from .core import ParseError, QASample, Sample, SchemaError, derive_rng
from .featurize import DEFAULT_DIM, EmbeddingStore, hash_store, save_embeddings, tokenize

__all__ = [
    "CorpusSplit",
    "SyntheticSpec",
    "SyntheticSpecError",
    "parse_conll_columns",
    "parse_qa_jsonl",
    "parse_mlc_jsonl",
    "write_conll",
    "write_qa_jsonl",
    "write_mlc_jsonl",
    "generate_synthetic",
    "write_corpus_dir",
    "load_split",
    "tokenize",
]


@dataclass
class CorpusSplit:
    """A named split whose label vocabulary covers every oracle label in it."""

    name: str
    samples: list[Sample] = field(default_factory=list)
    labels: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.samples)


class SyntheticSpecError(ValueError):
    """Inconsistent synthetic corpus parameters."""


# ---------------------------------------------------------------------------
# CoNLL column format
# ---------------------------------------------------------------------------

def parse_conll_columns(
    source: IO[str] | Iterable[str],
    token_col: int = 0,
    tag_col: int = 1,
    name: str = "train",
) -> CorpusSplit:
    """One sample per blank-line-terminated sentence; ``-DOCSTART-`` lines skipped.

    Column indices are explicit because CoNLL releases disagree on layout.
    """
    needed = max(token_col, tag_col)
    samples: list[Sample] = []
    seen: set[str] = set()
    tokens: list[str] = []
    tags: list[str] = []

    def flush():
        if tokens:
            samples.append(
                Sample(f"{name}-{len(samples)}", list(tokens), list(tags))
            )
            tokens.clear()
            tags.clear()

    for lineno, raw in enumerate(source, start=1):
        line = raw.rstrip("\n")
        if line.startswith("-DOCSTART-"):
            continue
        if not line.strip():
            flush()
            continue
        fields = line.split()
        if len(fields) <= needed:
            raise ParseError(
                f"{len(fields)} column(s), need at least {needed + 1}", lineno
            )
        tokens.append(fields[token_col])
        tag = fields[tag_col]
        tags.append(tag)
        seen.add(tag)
    flush()
    # sorted so the derived action space is stable across splits of a corpus
    return CorpusSplit(name, samples, sorted(seen))


def write_conll(split: CorpusSplit, sink: IO[str]) -> None:
    for sample in split.samples:
        for token, tag in zip(sample.tokens(), sample.oracle_label):
            sink.write(f"{token} {tag}\n")
        sink.write("\n")


# ---------------------------------------------------------------------------
# QA JSONL
# ---------------------------------------------------------------------------

def _qa_from_arc(obj: dict, lineno: int) -> dict:
    """Map the ARC item shape onto the normalized one."""
    try:
        question = obj["question"]["stem"]
        raw_choices = obj["question"]["choices"]
        answer_key = obj["answerKey"]
    except (KeyError, TypeError):
        raise SchemaError("not an ARC-shaped item", lineno) from None
    choices = {c["label"]: c["text"] for c in raw_choices}
    return {
        "id": obj.get("id"),
        "question": question,
        "facts": obj.get("facts", []),
        "choices": choices,
        "answer_key": answer_key,
    }


def parse_qa_jsonl(
    source: IO[str] | Iterable[str], name: str = "train", arc_format: bool = False
) -> CorpusSplit:
    """Normalized item shape: question, facts (optional), choices map, answer key."""
    samples: list[Sample] = []
    keys_seen: set[str] = set()
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(str(exc), lineno) from None
        if arc_format:
            obj = _qa_from_arc(obj, lineno)
        for field_name in ("question", "choices"):
            if field_name not in obj:
                raise SchemaError(f"missing field {field_name!r}", lineno)
        answer_key = obj.get("answer_key", obj.get("answerKey"))
        if answer_key is None:
            raise SchemaError("missing field 'answer_key'", lineno)
        choices = obj["choices"]
        if not isinstance(choices, dict) or not choices:
            raise SchemaError("'choices' must be a non-empty key->text map", lineno)
        if answer_key not in choices:
            raise SchemaError(f"answer key {answer_key!r} not among choices", lineno)
        facts = obj.get("facts", [])
        if not isinstance(facts, list):
            raise SchemaError("'facts' must be a list", lineno)
        ordered = {k: choices[k] for k in sorted(choices)}
        samples.append(
            QASample(
                id=str(obj.get("id") or f"{name}-{len(samples)}"),
                input_text=obj["question"],
                oracle_label=[answer_key],
                question=obj["question"],
                facts=[str(f) for f in facts],
                choices=ordered,
                answer_key=answer_key,
            )
        )
        keys_seen.update(ordered)
    return CorpusSplit(name, samples, sorted(keys_seen))


def write_qa_jsonl(split: CorpusSplit, sink: IO[str]) -> None:
    for sample in split.samples:
        assert isinstance(sample, QASample)
        obj = {
            "id": sample.id,
            "question": sample.question,
            "facts": sample.facts,
            "choices": sample.choices,
            "answer_key": sample.answer_key,
        }
        sink.write(json.dumps(obj, ensure_ascii=False) + "\n")


# ---------------------------------------------------------------------------
# MLC JSONL
# ---------------------------------------------------------------------------

def parse_mlc_jsonl(source: IO[str] | Iterable[str], name: str = "train") -> CorpusSplit:
    samples: list[Sample] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(str(exc), lineno) from None
        if "text" not in obj:
            raise SchemaError("missing field 'text'", lineno)
        if "labels" not in obj:
            raise SchemaError("missing field 'labels'", lineno)
        if not isinstance(obj["labels"], list):
            raise SchemaError("'labels' must be a list", lineno)
        sample_labels = [str(l) for l in obj["labels"]]
        samples.append(
            Sample(
                id=str(obj.get("id") or f"{name}-{len(samples)}"),
                input_text=str(obj["text"]),
                oracle_label=sample_labels,
            )
        )
        seen.update(sample_labels)
    return CorpusSplit(name, samples, sorted(seen))


def write_mlc_jsonl(split: CorpusSplit, sink: IO[str]) -> None:
    for sample in split.samples:
        obj = {"id": sample.id, "text": sample.text(), "labels": sample.oracle_label}
        sink.write(json.dumps(obj, ensure_ascii=False) + "\n")


# ---------------------------------------------------------------------------
# Synthetic corpora
# ---------------------------------------------------------------------------

@dataclass
class SyntheticSpec:
    """Parameters for a generated corpus; same spec + seed => identical corpus.

    ``vocab_size``/``num_labels`` drive tagging; QA uses topic structure
    (``num_topics`` word clusters, one per choice) and MLC keyword structure
    (disjoint keyword sets per label, filler words carry no signal).
    """

    task: str = "seqtag"
    seed: int = 0
    counts: tuple[int, int, int] = (500, 100, 100)
    vocab_size: int = 100
    num_labels: int = 3
    # qa
    num_choices: int = 3
    num_topics: int = 4
    words_per_topic: int = 4
    # mlc
    keywords_per_label: int = 4
    max_labels_per_sample: int = 3
    num_fillers: int = 20

    def __post_init__(self):
        if self.task not in ("seqtag", "mlc", "qa"):
            raise SyntheticSpecError(f"unknown task {self.task!r}")
        if any(c < 0 for c in self.counts):
            raise SyntheticSpecError("split counts must be nonnegative")
        if self.task == "seqtag" and self.num_labels > self.vocab_size:
            raise SyntheticSpecError(
                f"{self.num_labels} tags but only {self.vocab_size} words: "
                "every tag needs its own sub-vocabulary"
            )
        if self.task == "qa":
            if self.num_choices < 2:
                raise SyntheticSpecError("QA items need at least 2 choices")
            if self.num_topics < self.num_choices:
                raise SyntheticSpecError(
                    "need at least as many topics as choices for distinct distractors"
                )
            if self.words_per_topic < 4:
                raise SyntheticSpecError("topics need at least 4 words")
        if self.task == "mlc" and self.max_labels_per_sample > self.num_labels:
            raise SyntheticSpecError("max labels per sample exceeds label count")


SPLIT_NAMES = ("train", "dev", "test")


def seqtag_tags(spec: SyntheticSpec) -> list[str]:
    return [f"T{c}" for c in range(spec.num_labels)]


def seqtag_tag_of_word(word: str) -> str:
    """The generating rule: a word's tag is baked into its name."""
    return "T" + word.split("_", 1)[0][1:]


def _gen_seqtag(spec: SyntheticSpec) -> dict[str, CorpusSplit]:
    tags = seqtag_tags(spec)
    words = [f"c{i % spec.num_labels}_{i:04d}" for i in range(spec.vocab_size)]
    splits = {}
    for split_name, count in zip(SPLIT_NAMES, spec.counts):
        rng = derive_rng(spec.seed, "synthetic-seqtag", split_name)
        samples = []
        for n in range(count):
            length = int(rng.integers(3, 9))
            picks = [words[int(i)] for i in rng.integers(0, len(words), size=length)]
            samples.append(
                Sample(
                    f"{split_name}-{n}",
                    picks,
                    [seqtag_tag_of_word(w) for w in picks],
                )
            )
        splits[split_name] = CorpusSplit(split_name, samples, tags)
    return splits


def qa_topic_words(spec: SyntheticSpec, topic: int) -> list[str]:
    return [f"t{topic}w{j}" for j in range(spec.words_per_topic)]


def _gen_qa(spec: SyntheticSpec) -> dict[str, CorpusSplit]:
    fillers = [f"f{j}" for j in range(spec.num_fillers)]
    keys = [chr(ord("A") + i) for i in range(spec.num_choices)]
    splits = {}
    for split_name, count in zip(SPLIT_NAMES, spec.counts):
        rng = derive_rng(spec.seed, "synthetic-qa", split_name)
        samples = []
        for n in range(count):
            topics = rng.choice(spec.num_topics, size=spec.num_choices, replace=False)
            correct_pos = int(rng.integers(spec.num_choices))
            topic = int(topics[correct_pos])
            topic_pool = qa_topic_words(spec, topic)
            wpt = len(topic_pool)
            q_words = [topic_pool[int(i)] for i in rng.choice(wpt, min(3, wpt), replace=False)]
            q_fill = [fillers[int(i)] for i in rng.choice(len(fillers), 1, replace=False)]
            fact_words = [topic_pool[int(i)] for i in rng.choice(wpt, min(4, wpt), replace=False)]
            # the correct choice reuses words that occur in question+facts, so a
            # token-overlap oracle always finds it; distractors share nothing
            visible = sorted(set(q_words) | set(fact_words))
            n_choice_words = min(3, len(visible))
            choice_words = [
                visible[int(i)] for i in rng.choice(len(visible), n_choice_words, replace=False)
            ]
            choices = {}
            for pos, key in enumerate(keys):
                if pos == correct_pos:
                    choices[key] = " ".join(choice_words)
                else:
                    other_pool = qa_topic_words(spec, int(topics[pos]))
                    picks = rng.choice(len(other_pool), min(3, len(other_pool)), replace=False)
                    choices[key] = " ".join(other_pool[int(i)] for i in picks)
            question = " ".join(q_words + q_fill)
            facts = [" ".join(fact_words[:2]), " ".join(fact_words[2:])]
            samples.append(
                QASample(
                    id=f"{split_name}-{n}",
                    input_text=question,
                    oracle_label=[keys[correct_pos]],
                    question=question,
                    facts=facts,
                    choices=choices,
                    answer_key=keys[correct_pos],
                )
            )
        splits[split_name] = CorpusSplit(split_name, samples, list(keys))
    return splits


def mlc_labels(spec: SyntheticSpec) -> list[str]:
    return [f"L{i}" for i in range(spec.num_labels)]


def mlc_keywords(spec: SyntheticSpec, label_ix: int) -> list[str]:
    return [f"k{label_ix}w{j}" for j in range(spec.keywords_per_label)]


def _gen_mlc(spec: SyntheticSpec) -> dict[str, CorpusSplit]:
    labels = mlc_labels(spec)
    fillers = [f"f{j}" for j in range(spec.num_fillers)]
    splits = {}
    for split_name, count in zip(SPLIT_NAMES, spec.counts):
        rng = derive_rng(spec.seed, "synthetic-mlc", split_name)
        samples = []
        for n in range(count):
            k = int(rng.integers(1, spec.max_labels_per_sample + 1))
            own = sorted(int(i) for i in rng.choice(spec.num_labels, k, replace=False))
            words = []
            for label_ix in own:
                pool = mlc_keywords(spec, label_ix)
                picks = rng.choice(len(pool), int(rng.integers(2, 4)), replace=False)
                words.extend(pool[int(i)] for i in picks)
            picks = rng.choice(len(fillers), int(rng.integers(2, 5)), replace=False)
            words.extend(fillers[int(i)] for i in picks)
            order = rng.permutation(len(words))
            samples.append(
                Sample(
                    f"{split_name}-{n}",
                    " ".join(words[int(i)] for i in order),
                    [labels[i] for i in own],
                )
            )
        splits[split_name] = CorpusSplit(split_name, samples, labels)
    return splits


def generate_synthetic(spec: SyntheticSpec) -> dict[str, CorpusSplit]:
    """Generate {train, dev, test} splits; deterministic in (spec, seed)."""
    if spec.task == "seqtag":
        return _gen_seqtag(spec)
    if spec.task == "qa":
        return _gen_qa(spec)
    return _gen_mlc(spec)


def corpus_vocabulary(splits: dict[str, CorpusSplit]) -> list[str]:
    """Every distinct input token across all splits, sorted."""
    words: set[str] = set()
    for split in splits.values():
        for sample in split.samples:
            if isinstance(sample, QASample):
                words.update(tokenize(sample.question))
                for fact in sample.facts:
                    words.update(tokenize(fact))
                for text in sample.choices.values():
                    words.update(tokenize(text))
            elif isinstance(sample.input_text, str):
                words.update(tokenize(sample.input_text))
            else:
                words.update(sample.input_text)
    return sorted(words)


def synthetic_embeddings(
    splits: dict[str, CorpusSplit], dimension: int = DEFAULT_DIM, seed: int = 0
) -> EmbeddingStore:
    """A table assigning each corpus word its stable hash vector.

    File-backed and hash-policy runs then see identical observations.
    """
    base = hash_store(dimension, seed=seed)
    table = {w: base.embed(w) for w in corpus_vocabulary(splits)}
    return EmbeddingStore(dimension, table, oov_policy="zeros", seed=seed)


def write_corpus_dir(
    task: str,
    splits: dict[str, CorpusSplit],
    out_dir: str | Path,
    embedding_dim: int = DEFAULT_DIM,
    embedding_seed: int = 0,
) -> dict[str, Path]:
    """Write splits (+ a matching embedding file) in the standard formats."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {}
    for split_name, split in splits.items():
        if task == "seqtag":
            path = out / f"{split_name}.conll"
            with path.open("w", encoding="utf-8") as sink:
                write_conll(split, sink)
        elif task == "qa":
            path = out / f"{split_name}.jsonl"
            with path.open("w", encoding="utf-8") as sink:
                write_qa_jsonl(split, sink)
        else:
            path = out / f"{split_name}.jsonl"
            with path.open("w", encoding="utf-8") as sink:
                write_mlc_jsonl(split, sink)
        paths[split_name] = path
    store = synthetic_embeddings(splits, embedding_dim, embedding_seed)
    emb_path = out / "embeddings.vec"
    with emb_path.open("w", encoding="utf-8") as sink:
        save_embeddings(store, sink)
    paths["embeddings"] = emb_path
    return paths


def load_split(task: str, path: str | Path, name: str | None = None) -> CorpusSplit:
    """Parse one split file in the format matching ``task``."""
    if task not in ("seqtag", "qa", "mlc"):
        raise ValueError(f"unknown task {task!r}")
    path = Path(path)
    split_name = name or path.stem
    with path.open("r", encoding="utf-8") as source:
        if task == "seqtag":
            return parse_conll_columns(source, name=split_name)
        if task == "qa":
            return parse_qa_jsonl(source, name=split_name)
        return parse_mlc_jsonl(source, name=split_name)


def rename_split(split: CorpusSplit, name: str) -> CorpusSplit:
    samples = [replace(s, id=f"{name}-{i}") for i, s in enumerate(split.samples)]
    return CorpusSplit(name, samples, list(split.labels))
