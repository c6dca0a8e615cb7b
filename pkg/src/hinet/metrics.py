"""Evaluation indices for screening speed/recall and for topic assignment precision."""

from __future__ import annotations

import csv
import warnings
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DegenerateZero, SizeMismatch
from .propagate import LabelEdge

TOP_REFERENCE = 20


@dataclass(frozen=True)
class TimingRecord:
    t_wmd: float | None = None
    t_screened: float | None = None
    t_strategy: float | None = None
    t_fullsort: float | None = None

    def __post_init__(self):
        for name in ("t_wmd", "t_screened", "t_strategy", "t_fullsort"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ValueError(f"{name} must be positive, got {v}")


def time_improvement(rec: TimingRecord) -> float:
    return (rec.t_wmd - rec.t_screened) / rec.t_wmd


def accuracy_n(full_top: Iterable[str], screened_top: Iterable[str],
               n_ref: int = TOP_REFERENCE) -> float:
    """Share of the exhaustive top list that the screened top list recovered.

    ``n_ref`` is 20 by default; pass ``min(20, pool size)`` for tiny corpora.
    The screened list may be shorter than ``n_ref`` when fewer candidates survive.
    """
    full = set(full_top)
    screened = set(screened_top)
    if len(full) != n_ref:
        raise SizeMismatch(f"reference list has {len(full)} members, expected {n_ref}")
    if len(screened) > n_ref:
        raise SizeMismatch(f"screened list has {len(screened)} members, more than {n_ref}")
    return len(full & screened) / n_ref


def f1_score(ti: float, acc: float) -> float:
    if ti == 0 and acc == 0:
        raise DegenerateZero("time improvement and accuracy are both zero")
    return 2 * ti * acc / (ti + acc)


def e_time(rec: TimingRecord) -> float:
    return rec.t_strategy / rec.t_fullsort


@dataclass
class TopicRow:
    topic: str
    training: int
    test: int
    correct: int

    @property
    def precision(self) -> float:
        return self.correct / self.test


@dataclass
class PrecisionReport:
    rows: list[TopicRow]
    omitted: list[str] = field(default_factory=list)

    @property
    def macro_precision(self) -> float:
        return sum(r.precision for r in self.rows) / len(self.rows) if self.rows else float("nan")

    @property
    def micro_precision(self) -> float:
        test = sum(r.test for r in self.rows)
        return sum(r.correct for r in self.rows) / test if test else float("nan")

    def row(self, topic: str) -> TopicRow:
        return next(r for r in self.rows if r.topic == topic)


def predicted_topics(inferred: Iterable[LabelEdge]) -> dict[str, str]:
    """Strongest topic per unit; ties go to the lower topic id."""
    best: dict[str, tuple[float, str]] = {}
    for l in inferred:
        cur = best.get(l.unit)
        if cur is None or (-l.weight, l.topic) < (-cur[0], cur[1]):
            best[l.unit] = (l.weight, l.topic)
    return {u: t for u, (_, t) in best.items()}


def topic_precision(
    known_holdout: Iterable[LabelEdge],
    inferred: Iterable[LabelEdge],
    training: Iterable[LabelEdge] = (),
) -> PrecisionReport:
    """Per-topic precision of held-out units; a unit counts as correct when its
    strongest inferred topic is the held-out one."""
    holdout = list(known_holdout)
    pred = predicted_topics(inferred)
    train_counts = Counter(l.topic for l in training)
    per_topic: dict[str, list[str]] = defaultdict(list)
    for l in holdout:
        per_topic[l.topic].append(l.unit)
    topics = sorted(set(per_topic) | set(train_counts))
    rows, omitted = [], []
    for t in topics:
        units = per_topic.get(t, [])
        if not units:
            warnings.warn(f"topic {t!r} has no test units; omitted from the average", stacklevel=2)
            omitted.append(t)
            continue
        correct = sum(1 for u in units if pred.get(u) == t)
        rows.append(TopicRow(t, train_counts.get(t, 0), len(units), correct))
    return PrecisionReport(rows, omitted)


# --- reports ------------------------------------------------------------------


def write_metric_rows(path: str | Path, rows: Sequence[tuple[str, str, float]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["metric", "parameters", "value"])
        for metric, params, value in rows:
            w.writerow([metric, params, repr(float(value))])


def write_precision_table(path: str | Path, report: PrecisionReport) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["topic", "training", "test", "correct", "precision_pct"])
        for r in report.rows:
            w.writerow([r.topic, r.training, r.test, r.correct, f"{100 * r.precision:.2f}"])
        if report.rows:
            n = len(report.rows)
            w.writerow([
                "Average",
                round(sum(r.training for r in report.rows) / n),
                round(sum(r.test for r in report.rows) / n),
                round(sum(r.correct for r in report.rows) / n),
                f"{100 * report.macro_precision:.2f}",
            ])
            w.writerow([
                "Pooled",
                sum(r.training for r in report.rows),
                sum(r.test for r in report.rows),
                sum(r.correct for r in report.rows),
                f"{100 * report.micro_precision:.2f}",
            ])
