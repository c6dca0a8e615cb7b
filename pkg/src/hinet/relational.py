"""Doc-Doc, Item-Item and Topic-Topic similarity edges.

Each unit's SimHash fingerprint is screened against every other unit of the
same kind; only the Top-N survivors get an exact WMD and become directed edges.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import Kind, NbowVector, TextUnit, TokenizerConfig, to_nbow, tokenize
from .embedding import EmbeddingTable
from .errors import DegenerateDocument, ParseError
from .fingerprint import STRATEGIES, Fingerprint, HashSpec, simhash
from .transport import wmd

log = logging.getLogger(__name__)

EDGE_KIND = {Kind.DOC: "DD", Kind.ITEM: "II", Kind.TOPIC: "TT"}


@dataclass(frozen=True, order=True)
class SimilarityEdge:
    src: str
    dst: str
    kind: str
    distance: float
    similarity: float

    def __post_init__(self):
        if self.src == self.dst:
            raise ValueError(f"self-loop on {self.src!r}")
        if self.kind not in ("DD", "II", "TT"):
            raise ValueError(f"not a similarity edge kind: {self.kind!r}")


@dataclass(frozen=True)
class SimilarityConfig:
    f: int = 64
    strategy: str = "window"
    tokenizer: TokenizerConfig = TokenizerConfig()
    # kinds with fewer than 2 * n_top units skip screening and weigh every pair
    skip_screening_for: frozenset[str] = frozenset({"TT"})
    threads: int = 1


def similarity_from_distance(d: float) -> float:
    if not d >= 0:
        raise ValueError(f"distance must be non-negative, got {d}")
    return 1.0 / (1.0 + d)


def prepare_units(units: Sequence[TextUnit], table: EmbeddingTable, cfg: SimilarityConfig):
    """Tokenize, fingerprint and nBOW-encode units; degenerate ones are split off."""
    fps: dict[str, Fingerprint] = {}
    nbows: dict[str, NbowVector] = {}
    skipped: list[str] = []
    hasher = HashSpec(cfg.f)
    for u in units:
        counts = tokenize(u, cfg.tokenizer)
        try:
            nbows[u.id] = to_nbow(counts, table)
        except DegenerateDocument:
            skipped.append(u.id)
            continue
        fps[u.id] = simhash(counts, cfg.f, hasher)
    if skipped:
        log.warning("%d unit(s) have no in-vocabulary token and get no similarity edges: %s",
                    len(skipped), ", ".join(skipped[:10]))
    return fps, nbows, skipped


def screen(
    fingerprints: Mapping[str, Fingerprint], n_top: int, strategy: str = "window"
) -> dict[str, list[tuple[str, int]]]:
    """Top-N Hamming candidates for every unit, excluding itself.

    The pool is visited in sorted id order so distance ties favour lower ids.
    """
    if n_top < 1:
        raise ValueError("n_top must be >= 1")
    select = STRATEGIES[strategy]
    ids = sorted(fingerprints)
    bits = [fingerprints[i].bits for i in ids]
    out = {}
    for t, uid in enumerate(ids):
        pool = bits[:t] + bits[t + 1:]
        picked = select(bits[t], pool, n_top)
        picked = sorted(picked, key=lambda e: (e[1], e[0]))
        out[uid] = [(ids[p if p < t else p + 1], d) for p, d in picked]
    return out


def all_pairs(ids: Iterable[str]) -> dict[str, list[tuple[str, int]]]:
    ids = sorted(ids)
    return {u: [(v, -1) for v in ids if v != u] for u in ids}


def _solve_chunk(args):
    pairs, nbows, table = args
    return [wmd(nbows[s], nbows[d], table) for s, d in pairs]


def weigh(
    candidates: Mapping[str, Sequence[tuple[str, int]]],
    nbows: Mapping[str, NbowVector],
    table: EmbeddingTable,
    kind: str,
    threads: int = 1,
) -> list[SimilarityEdge]:
    pairs = sorted((s, d) for s, cands in candidates.items() for d, _ in cands if s != d)
    if threads > 1 and len(pairs) > 1:
        chunk = max(1, len(pairs) // (threads * 4))
        chunks = [pairs[i:i + chunk] for i in range(0, len(pairs), chunk)]
        with ProcessPoolExecutor(max_workers=threads) as ex:
            results = ex.map(_solve_chunk, [(c, nbows, table) for c in chunks])
            distances = [x for part in results for x in part]
    else:
        distances = [wmd(nbows[s], nbows[d], table) for s, d in pairs]
    return [
        SimilarityEdge(s, d, kind, dist, similarity_from_distance(dist))
        for (s, d), dist in zip(pairs, distances)
    ]


def build_similarity_graph(
    units: Sequence[TextUnit],
    table: EmbeddingTable,
    n_top: int,
    cfg: SimilarityConfig = SimilarityConfig(),
) -> tuple[list[SimilarityEdge], list[str]]:
    """Directed similarity edges over units of a single kind.

    Returns the edges sorted by ``(src, dst)`` and the ids of units skipped as
    degenerate.
    """
    kinds = {u.kind for u in units}
    if len(kinds) > 1:
        raise ValueError(f"units of mixed kinds: {sorted(k.value for k in kinds)}")
    if not units:
        return [], []
    kind = EDGE_KIND[units[0].kind]
    fps, nbows, skipped = prepare_units(units, table, cfg)
    if kind in cfg.skip_screening_for and len(fps) < 2 * n_top:
        candidates = all_pairs(fps)
    else:
        candidates = screen(fps, n_top, cfg.strategy)
    return weigh(candidates, nbows, table, kind, cfg.threads), skipped


# --- edge dump ----------------------------------------------------------------


def write_edges(path: str | Path, edges: Iterable[SimilarityEdge]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for e in sorted(edges, key=lambda e: (e.kind, e.src, e.dst)):
            rec = {"src": e.src, "dst": e.dst, "kind": e.kind,
                   "distance": e.distance, "similarity": e.similarity}
            fh.write(json.dumps(rec) + "\n")


def read_edges(path: str | Path) -> list[SimilarityEdge]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                r = json.loads(line)
                out.append(SimilarityEdge(r["src"], r["dst"], r["kind"],
                                          float(r["distance"]), float(r["similarity"])))
            except (json.JSONDecodeError, KeyError, ValueError) as e:
                raise ParseError(f"{path}:{lineno}: {e}") from e
    return out
