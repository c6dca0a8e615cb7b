"""Screening benchmarks: the time/recall sweep over N and the selection-strategy timing."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .corpus import TextUnit, TokenizerConfig, to_nbow, tokenize
from .embedding import EmbeddingTable
from .fingerprint import STRATEGIES, HashSpec, simhash
from .metrics import TOP_REFERENCE, TimingRecord, accuracy_n, e_time, f1_score, time_improvement
from .transport import wmd


@dataclass(frozen=True)
class SweepRow:
    n_top: int
    ti: float
    accuracy: float
    f1: float
    t_wmd: float
    t_screened: float


def _top_ref(scored: list[tuple[float, str]], n: int) -> list[str]:
    return [uid for _, uid in sorted(scored)[:n]]


def tradeoff_sweep(
    docs: list[TextUnit],
    table: EmbeddingTable,
    grid: tuple[int, ...],
    queries: int = 8,
    seed: int = 0,
    f: int = 64,
    strategy: str = "window",
    tokenizer: TokenizerConfig = TokenizerConfig(),
) -> list[SweepRow]:
    """TI, Accuracy_N and F1 per N, averaged over randomly drawn query documents.

    The exhaustive run weighs every other document; the screened run computes
    the query fingerprint, picks the N nearest by Hamming distance and weighs
    only those. nBOW vectors and corpus fingerprints are built beforehand and
    excluded from both timings.
    """
    counts = [tokenize(d, tokenizer) for d in docs]
    nbows = [to_nbow(c, table) for c in counts]
    hasher = HashSpec(f)
    bits = [simhash(c, f, hasher).bits for c in counts]
    ids = [d.id for d in docs]
    select = STRATEGIES[strategy]
    rng = np.random.default_rng(seed)
    chosen = sorted(int(q) for q in rng.choice(len(docs), size=min(queries, len(docs)), replace=False))

    per_n: dict[int, list[tuple[float, float, float]]] = {n: [] for n in grid}
    for q in chosen:
        others = [i for i in range(len(docs)) if i != q]
        n_ref = min(TOP_REFERENCE, len(others))

        t0 = time.perf_counter()
        full = [(wmd(nbows[q], nbows[i], table), ids[i]) for i in others]
        t_wmd = time.perf_counter() - t0
        reference = _top_ref(full, n_ref)

        pool = [bits[i] for i in others]
        for n in grid:
            t0 = time.perf_counter()
            target = simhash(counts[q], f, hasher).bits
            picked = select(target, pool, min(n, len(pool)))
            scored = [(wmd(nbows[q], nbows[others[p]], table), ids[others[p]]) for p, _ in picked]
            t_screened = time.perf_counter() - t0
            acc = accuracy_n(reference, _top_ref(scored, n_ref), n_ref)
            per_n[n].append((t_wmd, t_screened, acc))

    rows = []
    for n in grid:
        t_wmd = float(np.mean([r[0] for r in per_n[n]]))
        t_scr = float(np.mean([r[1] for r in per_n[n]]))
        acc = float(np.mean([r[2] for r in per_n[n]]))
        ti = time_improvement(TimingRecord(t_wmd=t_wmd, t_screened=t_scr))
        f1 = f1_score(ti, acc) if (ti != 0 or acc != 0) else 0.0
        rows.append(SweepRow(n, ti, acc, f1, t_wmd, t_scr))
    return rows


def strategy_rounds(pool: list[int], target: int, k: int, repeats: int) -> dict[str, list[float]]:
    """Wall time of every selection strategy, ``repeats`` rounds run round-robin.

    Running the strategies back to back inside each round lets slow drift in
    machine load hit all of them alike.
    """
    out: dict[str, list[float]] = {name: [] for name in STRATEGIES}
    for _ in range(repeats):
        for name, select in STRATEGIES.items():
            t0 = time.perf_counter()
            select(target, pool, k)
            out[name].append(time.perf_counter() - t0)
    return out


def strategy_times(pool: list[int], target: int, k: int, repeats: int = 5) -> dict[str, float]:
    """Best-of-``repeats`` wall time of every selection strategy on one pool."""
    return {name: min(ts) for name, ts in strategy_rounds(pool, target, k, repeats).items()}


def etime_report(pool: list[int], target: int, k: int, repeats: int = 31) -> dict[str, float]:
    """E-Time of each strategy: median over rounds of its time relative to the
    full sort timed in the same round."""
    rounds = strategy_rounds(pool, target, k, repeats)
    return {
        name: float(np.median([e_time(TimingRecord(t_strategy=t, t_fullsort=base))
                               for t, base in zip(ts, rounds["fullsort"])]))
        for name, ts in rounds.items()
    }
