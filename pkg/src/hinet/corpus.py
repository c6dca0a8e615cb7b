"""Text units, tokenization and normalized bag-of-words vectors."""

from __future__ import annotations

import enum
import json
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import DegenerateDocument, ParseError

try:  # Python < 3.11
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib


class Kind(str, enum.Enum):
    DOC = "Doc"
    ITEM = "Item"
    TOPIC = "Topic"


@dataclass(frozen=True)
class TextUnit:
    id: str
    kind: Kind
    lines: tuple[str, ...]
    meta: Mapping[str, str] = field(default_factory=dict, compare=False)

    @property
    def raw_text(self) -> str:
        return "\n".join(self.lines)

    @classmethod
    def from_text(cls, id: str, kind: Kind | str, text: str, **meta) -> "TextUnit":
        # split("\n") rather than splitlines() so the join above is byte-exact
        return cls(id=id, kind=Kind(kind), lines=tuple(text.split("\n")), meta=meta)


TokenCounts = Counter  # token -> occurrence count, every count >= 1

_WORD = re.compile(r"\w+", re.UNICODE)


@dataclass(frozen=True)
class TokenizerConfig:
    lowercase: bool = True
    stopwords: frozenset[str] = frozenset()

    @classmethod
    def from_file(cls, path: str | Path) -> "TokenizerConfig":
        """Read ``lowercase`` and ``stopwords`` keys from a JSON or TOML file.

        ``stopwords`` is a path (relative to the config file) to a list with one
        word per line.
        """
        path = Path(path)
        raw = path.read_bytes()
        if path.suffix == ".json":
            data = json.loads(raw)
        else:
            data = tomllib.loads(raw.decode("utf-8"))
        return cls.from_mapping(data, base=path.parent)

    @classmethod
    def from_mapping(cls, data: Mapping, base: Path | None = None) -> "TokenizerConfig":
        lowercase = bool(data.get("lowercase", True))
        stop_path = data.get("stopwords")
        stopwords: frozenset[str] = frozenset()
        if stop_path:
            p = Path(stop_path)
            if base is not None and not p.is_absolute():
                p = base / p
            words = p.read_text(encoding="utf-8").split()
            stopwords = frozenset(w.lower() if lowercase else w for w in words)
        return cls(lowercase=lowercase, stopwords=stopwords)


def tokenize(unit: TextUnit | str, rules: TokenizerConfig = TokenizerConfig()) -> Counter:
    text = unit if isinstance(unit, str) else unit.raw_text
    if rules.lowercase:
        text = text.lower()
    counts = Counter(_WORD.findall(text))
    for w in rules.stopwords:
        counts.pop(w, None)
    return counts


@dataclass(frozen=True)
class NbowVector:
    """Sparse nBOW distribution: sorted vocabulary indices and their weights."""

    indices: np.ndarray
    weights: np.ndarray

    def __len__(self):
        return len(self.indices)

    def __eq__(self, other):
        if not isinstance(other, NbowVector):
            return NotImplemented
        return np.array_equal(self.indices, other.indices) and np.array_equal(
            self.weights, other.weights
        )

    __hash__ = None

    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.indices.tolist(), self.weights.tolist()))


def to_nbow(counts: Mapping[str, int], table) -> NbowVector:
    """Drop out-of-vocabulary tokens and normalize the rest to sum to one.

    Raises DegenerateDocument when nothing is left.
    """
    kept = {}
    for tok, c in counts.items():
        idx = table.vocab.get(tok)
        if idx is not None and c > 0:
            kept[idx] = kept.get(idx, 0) + c
    if not kept:
        raise DegenerateDocument("no token of the unit is in the embedding vocabulary")
    order = sorted(kept)
    c = np.array([kept[i] for i in order], dtype=np.float64)
    return NbowVector(indices=np.array(order, dtype=np.int64), weights=c / c.sum())


# --- corpus input -----------------------------------------------------------


def read_corpus(path: str | Path) -> list[TextUnit]:
    """Load Docs from a directory of ``*.txt`` files or a JSON Lines file."""
    path = Path(path)
    if path.is_dir():
        units = [
            TextUnit.from_text(p.stem, Kind.DOC, p.read_text(encoding="utf-8"))
            for p in sorted(path.glob("*.txt"))
        ]
    else:
        units = []
        for rec in _iter_jsonl(path):
            try:
                units.append(TextUnit.from_text(rec["id"], rec.get("kind", "Doc"), rec["text"]))
            except (KeyError, ValueError) as e:
                raise ParseError(f"{path}: bad corpus record {rec!r}") from e
    _check_unique(units, path)
    return units


def read_topics(path: str | Path) -> list[TextUnit]:
    units = []
    for rec in _iter_jsonl(Path(path)):
        try:
            units.append(
                TextUnit.from_text(
                    rec["id"], Kind.TOPIC, rec["description"], name=rec.get("name", rec["id"])
                )
            )
        except KeyError as e:
            raise ParseError(f"{path}: bad topic record {rec!r}") from e
    _check_unique(units, path)
    return units


def _check_unique(units: Iterable[TextUnit], path) -> None:
    seen = set()
    for u in units:
        key = (u.kind, u.id)
        if key in seen:
            raise ParseError(f"{path}: duplicate {u.kind.value} id {u.id!r}")
        seen.add(key)


def _iter_jsonl(path: Path):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                yield json.loads(line)
            except json.JSONDecodeError as e:
                raise ParseError(f"{path}:{lineno}: {e}") from e
