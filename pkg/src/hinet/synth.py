"""Seeded synthetic corpora: clustered embeddings, hierarchical documents with
planted section structure and topic labels, and numeric noise lines."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import Kind, TextUnit
from .embedding import EmbeddingTable, save_embeddings
from .propagate import LabelEdge, write_labels
from .segment import valid_successors

CONSONANTS = "bcdfghklmnprstvz"
VOWELS = "aeiou"


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 0
    n_docs: int = 200
    n_topics: int = 8
    # relative topic frequencies; topics 4 and 6 about three times the others
    topic_weights: tuple[float, ...] = (1, 1, 1, 3, 1, 3, 1, 1)
    words_per_topic: int = 20
    general_words: int = 30
    dim: int = 16
    centroid_scale: float = 0.5
    word_spread: float = 0.1
    topic_share: float = 0.9  # fraction of clause tokens drawn from the clause's topic
    max_depth: int = 4
    max_chapters: int = 5
    noise: str = "clean"  # "none", "clean" or "adversarial"
    noise_rate: float = 0.3  # chance that a clause body carries a table block
    holdout: float = 0.1


@dataclass
class SynthCorpus:
    docs: list[TextUnit]
    topics: list[TextUnit]
    table: EmbeddingTable
    item_topic: dict[str, str]
    doc_topic: dict[str, str]
    planted: dict[str, list[tuple[tuple[int, ...], int]]]  # doc -> [(section no, line)]
    train: list[LabelEdge] = field(default_factory=list)
    holdout: list[LabelEdge] = field(default_factory=list)

    def write(self, out: str | Path, as_directory: bool = False) -> None:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        if as_directory:
            d = out / "docs"
            d.mkdir(exist_ok=True)
            for doc in self.docs:
                (d / f"{doc.id}.txt").write_text(doc.raw_text, encoding="utf-8", newline="\n")
        else:
            with open(out / "corpus.jsonl", "w", encoding="utf-8", newline="\n") as fh:
                for doc in self.docs:
                    fh.write(json.dumps({"id": doc.id, "kind": "Doc", "text": doc.raw_text}) + "\n")
        with open(out / "topics.jsonl", "w", encoding="utf-8", newline="\n") as fh:
            for t in self.topics:
                rec = {"id": t.id, "name": t.meta.get("name", t.id), "description": t.raw_text}
                fh.write(json.dumps(rec) + "\n")
        save_embeddings(self.table, out / "embeddings.txt")
        write_labels(out / "labels.jsonl", self.train)
        write_labels(out / "holdout.jsonl", self.holdout)
        with open(out / "planted.jsonl", "w", encoding="utf-8", newline="\n") as fh:
            for doc_id in sorted(self.planted):
                rec = {"doc": doc_id,
                       "headers": [[".".join(map(str, no)), line] for no, line in self.planted[doc_id]]}
                fh.write(json.dumps(rec) + "\n")


class _Vocab:
    def __init__(self, rng: np.random.Generator, cfg: SynthConfig):
        self.rng = rng
        seen: set[str] = set()
        self.topic_words = [[self._word(seen) for _ in range(cfg.words_per_topic)]
                            for _ in range(cfg.n_topics)]
        self.general = [self._word(seen) for _ in range(cfg.general_words)]
        centroids = rng.normal(0.0, cfg.centroid_scale, size=(cfg.n_topics, cfg.dim))
        tokens, rows = [], []
        for t, words in enumerate(self.topic_words):
            for w in words:
                tokens.append(w)
                rows.append(centroids[t] + rng.normal(0.0, cfg.word_spread, cfg.dim))
        for w in self.general:
            tokens.append(w)
            rows.append(rng.normal(0.0, cfg.centroid_scale * 0.5, cfg.dim))
        self.table = EmbeddingTable.from_tokens(tokens, np.round(np.array(rows), 6))

    def _word(self, seen: set[str]) -> str:
        while True:
            n = int(self.rng.integers(2, 4))
            w = "".join(self.rng.choice(list(CONSONANTS)) + self.rng.choice(list(VOWELS))
                        for _ in range(n))
            if w not in seen:
                seen.add(w)
                return w

    def words(self, topic: int, n: int, share: float) -> list[str]:
        out = []
        for _ in range(n):
            if self.rng.random() < share:
                pool = self.topic_words[topic]
            else:
                pool = self.general
            out.append(pool[int(self.rng.integers(len(pool)))])
        return out


def _section_tree(rng, cfg: SynthConfig) -> list[tuple[int, ...]]:
    """Section numbers of one document in reading order."""
    out = []

    def grow(prefix: tuple[int, ...]):
        depth = len(prefix)
        if depth >= cfg.max_depth:
            return
        n_children = int(rng.integers(0, 4 if depth < 2 else 3))
        for c in range(1, n_children + 1):
            no = prefix + (c,)
            out.append(no)
            grow(no)

    for chapter in range(1, int(rng.integers(2, cfg.max_chapters + 1)) + 1):
        out.append((chapter,))
        grow((chapter,))
    return out


def _fmt(x: float) -> str:
    return f"{x:.1f}" if x < 100 else f"{x:.0f}"


def _noise_line(rng, last: tuple[int, ...], adversarial: bool) -> str:
    """A numeric table row. Clean rows never lead with a valid successor of ``last``."""
    cells = [_fmt(float(rng.uniform(0.0, 200.0))) for _ in range(int(rng.integers(2, 5)))]
    if adversarial:
        # unguarded: data cells, sometimes a short dotted number like a row label
        if rng.random() < 0.15:
            lead = f"{int(rng.integers(1, 13))}.{int(rng.integers(1, 10))}"
        else:
            lead = _fmt(float(rng.uniform(0.0, 200.0)))
        return " ".join([lead] + cells)
    successors = {".".join(map(str, s)) for s in valid_successors(last)}
    while True:
        lead = _fmt(float(rng.uniform(0.0, 200.0)))
        if lead not in successors:
            return " ".join([lead] + cells)


def generate(cfg: SynthConfig = SynthConfig()) -> SynthCorpus:
    rng = np.random.default_rng(cfg.seed)
    vocab = _Vocab(rng, cfg)
    weights = np.array(cfg.topic_weights[: cfg.n_topics], dtype=float)
    weights /= weights.sum()
    topic_ids = [f"T{t + 1:02d}" for t in range(cfg.n_topics)]

    topics = [
        TextUnit.from_text(topic_ids[t], Kind.TOPIC, " ".join(vocab.words(t, 16, 0.9)),
                           name=f"topic {t + 1}")
        for t in range(cfg.n_topics)
    ]

    docs, item_topic, doc_topic, planted = [], {}, {}, {}
    width = len(str(cfg.n_docs))
    mains = _allocate(rng, cfg.n_docs, weights)
    for d in range(cfg.n_docs):
        doc_id = f"D{d:0{width}d}"
        main = mains[d]
        doc_topic[doc_id] = topic_ids[main]
        lines = [" ".join(vocab.words(main, 6, 0.5)).capitalize(), ""]
        headers = []
        for no in _section_tree(rng, cfg):
            if rng.random() < 0.7:
                t = main
            else:
                t = int(rng.choice(cfg.n_topics, p=weights))
            section = ".".join(map(str, no))
            item_topic[f"{doc_id}#{section}"] = topic_ids[t]
            headers.append((no, len(lines)))
            lines.append(f"{section} " + " ".join(vocab.words(t, int(rng.integers(2, 5)), 0.9)).capitalize())
            for _ in range(int(rng.integers(2, 5))):
                lines.append(" ".join(vocab.words(t, int(rng.integers(8, 16)), cfg.topic_share)))
            if cfg.noise != "none" and rng.random() < cfg.noise_rate:
                lines.append(f"see table {int(rng.integers(1, 9))}.{int(rng.integers(1, 9))} for values")
                for _ in range(int(rng.integers(1, 4))):
                    lines.append(_noise_line(rng, no, cfg.noise == "adversarial"))
            lines.append("")
        planted[doc_id] = headers
        docs.append(TextUnit.from_text(doc_id, Kind.DOC, "\n".join(lines)))

    train, holdout = _split_labels(rng, item_topic, doc_topic, cfg.holdout)
    return SynthCorpus(docs, topics, vocab.table, item_topic, doc_topic, planted, train, holdout)


def _allocate(rng, n: int, weights: np.ndarray) -> list[int]:
    """Main topics for ``n`` documents in proportion to ``weights`` (largest remainder), shuffled."""
    exact = n * weights
    counts = np.floor(exact).astype(int)
    for t in np.argsort(-(exact - counts), kind="stable")[: n - counts.sum()]:
        counts[t] += 1
    order = [t for t, c in enumerate(counts) for _ in range(c)]
    return [order[i] for i in rng.permutation(n)]


def _split_labels(rng, item_topic, doc_topic, share):
    """Per-topic split of item labels into training and held-out sets; all doc labels train."""
    by_topic: dict[str, list[str]] = {}
    for item, t in sorted(item_topic.items()):
        by_topic.setdefault(t, []).append(item)
    train, holdout = [], []
    for t, items in sorted(by_topic.items()):
        order = rng.permutation(len(items))
        n_test = max(1, int(round(share * len(items)))) if len(items) > 1 else 0
        for rank, i in enumerate(order):
            (holdout if rank < n_test else train).append(LabelEdge(items[i], t, 1.0))
    train.extend(LabelEdge(d, t, 1.0) for d, t in sorted(doc_topic.items()))
    return sorted(train), sorted(holdout)


def generate_flat(n_docs: int, seed: int = 0, length: int = 24, cfg: SynthConfig | None = None):
    """Short single-topic documents for the screening benchmark; returns (docs, table)."""
    cfg = cfg or SynthConfig(seed=seed)
    rng = np.random.default_rng(seed)
    vocab = _Vocab(rng, cfg)
    weights = np.array(cfg.topic_weights[: cfg.n_topics], dtype=float)
    weights /= weights.sum()
    width = len(str(n_docs))
    docs = []
    for d in range(n_docs):
        t = int(rng.choice(cfg.n_topics, p=weights))
        docs.append(TextUnit.from_text(f"D{d:0{width}d}", Kind.DOC,
                                       " ".join(vocab.words(t, length, cfg.topic_share))))
    return docs, vocab.table


def random_fingerprints(n: int, f: int = 64, seed: int = 0) -> list[int]:
    rng = np.random.default_rng(seed)
    words = (f + 63) // 64
    raw = rng.integers(0, 2**63, size=(n, words), dtype=np.int64)
    top = rng.integers(0, 2, size=(n, words), dtype=np.int64)
    out = []
    for row, hi in zip(raw.tolist(), top.tolist()):
        v = 0
        for part, bit in zip(row, hi):
            v = (v << 64) | (bit << 63) | part
        out.append(v & ((1 << f) - 1))
    return out
