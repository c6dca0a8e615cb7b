"""Pre-trained word vectors in the text word2vec format and the word travel cost."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import DuplicateToken, IndexOutOfRange, ParseError


@dataclass(frozen=True)
class EmbeddingTable:
    vocab: Mapping[str, int]
    vectors: np.ndarray  # shape (n, dim), row i is the vector of token i

    def __post_init__(self):
        if self.vectors.ndim != 2 or self.vectors.shape[0] != len(self.vocab):
            raise ParseError(
                f"vocabulary has {len(self.vocab)} tokens but matrix has shape {self.vectors.shape}"
            )
        if not np.all(np.isfinite(self.vectors)):
            raise ParseError("embedding matrix contains non-finite values")
        self.vectors.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self):
        return len(self.vocab)

    @classmethod
    def from_tokens(cls, tokens: Sequence[str], vectors) -> "EmbeddingTable":
        vocab: dict[str, int] = {}
        for i, tok in enumerate(tokens):
            if tok in vocab:
                raise DuplicateToken(f"token {tok!r} appears more than once")
            vocab[tok] = i
        return cls(vocab=vocab, vectors=np.array(vectors, dtype=np.float64, copy=True))

    def tokens(self) -> list[str]:
        out = [""] * len(self.vocab)
        for tok, i in self.vocab.items():
            out[i] = tok
        return out


def load_embeddings(path: str | Path) -> EmbeddingTable:
    """Parse a text embedding file: header ``n d`` then ``token v1 .. vd`` per line."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ParseError(f"{path}:1: expected header 'n d', got {' '.join(header)!r}")
        try:
            n, dim = int(header[0]), int(header[1])
        except ValueError as e:
            raise ParseError(f"{path}:1: non-integer header") from e
        if n < 0 or dim < 1:
            raise ParseError(f"{path}:1: invalid header n={n} d={dim}")
        tokens: list[str] = []
        rows: list[list[float]] = []
        for lineno, line in enumerate(fh, 2):
            parts = line.rstrip("\n").rstrip("\r").split(" ")
            if parts == [""]:
                continue
            if len(parts) != dim + 1:
                raise ParseError(
                    f"{path}:{lineno}: expected {dim} components, got {len(parts) - 1}"
                )
            try:
                row = [float(x) for x in parts[1:]]
            except ValueError as e:
                raise ParseError(f"{path}:{lineno}: {e}") from e
            if not all(math.isfinite(x) for x in row):
                raise ParseError(f"{path}:{lineno}: non-finite component")
            tokens.append(parts[0])
            rows.append(row)
    if len(tokens) != n:
        raise ParseError(f"{path}: header declares {n} tokens, file has {len(tokens)}")
    vectors = np.array(rows, dtype=np.float64).reshape(len(rows), dim)
    return EmbeddingTable.from_tokens(tokens, vectors)


def save_embeddings(table: EmbeddingTable, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{len(table)} {table.dim}\n")
        for tok, row in zip(table.tokens(), table.vectors):
            fh.write(tok + " " + " ".join(repr(float(x)) for x in row) + "\n")


def word_cost(table: EmbeddingTable, i: int, j: int) -> float:
    n = len(table)
    if not (0 <= i < n and 0 <= j < n):
        raise IndexOutOfRange(f"index pair ({i}, {j}) outside vocabulary of size {n}")
    d = table.vectors[i] - table.vectors[j]
    return math.sqrt(float(d @ d))


def cost_matrix(table: EmbeddingTable, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """Euclidean costs between two index sets; only the needed pairs are computed."""
    a = table.vectors[rows]
    b = table.vectors[cols]
    diff = a[:, None, :] - b[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
