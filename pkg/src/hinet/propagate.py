"""Item-Topic and Doc-Topic edges inferred from known labels over similarity edges.

A unit with no label takes, for every topic T, the mean over its labelled
similar units S of ``sim(unit, s) * W(s, T)`` (missing labels count as 0 and
the mean divides by ``|S|``). A topic with no label takes, for every unit u,
the mean over its labelled similar topics P of ``W(u, p) * sim(topic, p)``.
Values below ``theta`` are dropped; survivors become confirmed labels and feed
the next round until nothing new appears.
"""

from __future__ import annotations

import enum
import json
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import NoLabeledNeighbors, ParseError
from .relational import SimilarityEdge


class Status(str, enum.Enum):
    KNOWN = "Known"
    INFERRED = "Inferred"
    CONFIRMED = "Confirmed"


@dataclass(frozen=True, order=True)
class LabelEdge:
    unit: str
    topic: str
    weight: float
    status: Status = Status.KNOWN

    def __post_init__(self):
        if not 0.0 <= self.weight <= 1.0:
            raise ValueError(f"label weight {self.weight} outside [0, 1]")
        object.__setattr__(self, "status", Status(self.status))


@dataclass(frozen=True)
class PropagationConfig:
    theta: float = 0.3
    max_iters: int = 10
    neighbor_cap: int = 20

    def __post_init__(self):
        if not 0.0 < self.theta <= 1.0:
            raise ValueError(f"theta must lie in (0, 1], got {self.theta}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.neighbor_cap < 1:
            raise ValueError("neighbor_cap must be >= 1")


def _adjacency(edges: Iterable[SimilarityEdge]) -> dict[str, list[tuple[str, float]]]:
    adj: dict[str, list[tuple[str, float]]] = defaultdict(list)
    for e in edges:
        adj[e.src].append((e.dst, e.similarity))
    for nbrs in adj.values():
        nbrs.sort(key=lambda x: (-x[1], x[0]))
    return adj


def _by_unit(labels: Iterable[LabelEdge]) -> dict[str, dict[str, float]]:
    out: dict[str, dict[str, float]] = defaultdict(dict)
    for l in labels:
        if l.status is not Status.INFERRED:
            out[l.unit][l.topic] = l.weight
    return out


def _by_topic(labels: Iterable[LabelEdge]) -> dict[str, dict[str, float]]:
    out: dict[str, dict[str, float]] = defaultdict(dict)
    for l in labels:
        if l.status is not Status.INFERRED:
            out[l.topic][l.unit] = l.weight
    return out


def _from_units(target, adj, by_unit, cfg) -> list[LabelEdge]:
    support = [(n, s) for n, s in adj.get(target, ()) if by_unit.get(n)][: cfg.neighbor_cap]
    if not support:
        raise NoLabeledNeighbors(f"{target!r} has no labelled similar unit")
    totals: dict[str, float] = defaultdict(float)
    for nbr, sim in support:
        for topic, w in by_unit[nbr].items():
            totals[topic] += sim * w
    size = len(support)
    return [
        LabelEdge(target, topic, min(total / size, 1.0), Status.INFERRED)
        for topic, total in sorted(totals.items())
        if total > 0 and total / size >= cfg.theta
    ]


def _from_topics(target, adj, by_topic, cfg) -> list[LabelEdge]:
    support = [(p, s) for p, s in adj.get(target, ()) if by_topic.get(p)][: cfg.neighbor_cap]
    if not support:
        raise NoLabeledNeighbors(f"topic {target!r} has no labelled similar topic")
    totals: dict[str, float] = defaultdict(float)
    for p, sim in support:
        for unit, w in by_topic[p].items():
            totals[unit] += w * sim
    size = len(support)
    return [
        LabelEdge(unit, target, min(total / size, 1.0), Status.INFERRED)
        for unit, total in sorted(totals.items())
        if total > 0 and total / size >= cfg.theta
    ]


def propagate_from_items(
    target: str,
    sim_edges: Iterable[SimilarityEdge],
    labels: Iterable[LabelEdge],
    cfg: PropagationConfig = PropagationConfig(),
) -> list[LabelEdge]:
    """Inferred topic edges for one unlabelled Item from its labelled similar Items."""
    return _from_units(target, _adjacency(sim_edges), _by_unit(labels), cfg)


# Docs over Doc-Doc edges follow the same rule as Items over Item-Item edges.
propagate_doc_topic = propagate_from_items


def propagate_from_topics(
    target_topic: str,
    tt_edges: Iterable[SimilarityEdge],
    labels: Iterable[LabelEdge],
    cfg: PropagationConfig = PropagationConfig(),
) -> list[LabelEdge]:
    """Inferred unit edges for one unlabelled Topic from its labelled similar Topics."""
    return _from_topics(target_topic, _adjacency(tt_edges), _by_topic(labels), cfg)


def confirm_labels(
    units: Iterable[str],
    topics: Iterable[str],
    unit_edges: Sequence[SimilarityEdge],
    topic_edges: Sequence[SimilarityEdge],
    labels: Iterable[LabelEdge],
    cfg: PropagationConfig = PropagationConfig(),
) -> tuple[list[LabelEdge], int]:
    """Run confirmation rounds to a fixpoint; returns all labels and the rounds used.

    Each round reads a frozen snapshot of the labels. When both rules score the
    same (unit, topic) pair in one round the larger value is kept.
    """
    units = sorted(set(units))
    topics = sorted(set(topics))
    unit_adj = _adjacency(unit_edges)
    topic_adj = _adjacency(topic_edges)
    current = {(l.unit, l.topic): l for l in labels}
    rounds = 0
    for rounds in range(1, cfg.max_iters + 1):
        snapshot = list(current.values())
        by_unit = _by_unit(snapshot)
        by_topic = _by_topic(snapshot)
        found: dict[tuple[str, str], float] = {}
        for u in units:
            if by_unit.get(u):
                continue
            try:
                for e in _from_units(u, unit_adj, by_unit, cfg):
                    found[(e.unit, e.topic)] = max(found.get((e.unit, e.topic), 0.0), e.weight)
            except NoLabeledNeighbors:
                pass
        for t in topics:
            if by_topic.get(t):
                continue
            try:
                for e in _from_topics(t, topic_adj, by_topic, cfg):
                    found[(e.unit, e.topic)] = max(found.get((e.unit, e.topic), 0.0), e.weight)
            except NoLabeledNeighbors:
                pass
        new = {k: w for k, w in found.items() if k not in current}
        if not new:
            break
        for (u, t), w in new.items():
            current[(u, t)] = LabelEdge(u, t, w, Status.CONFIRMED)
    return sorted(current.values(), key=lambda l: (l.unit, l.topic)), rounds


def iterate_confirmation(graph, cfg: PropagationConfig = PropagationConfig()):
    """Grow the graph's Item-Topic and Doc-Topic edges by confirmation rounds."""
    from .graph import label_edges_of, similarity_edges_of

    topics = graph.nodes["Topic"]
    tt = similarity_edges_of(graph, "TT")
    it, _ = confirm_labels(graph.nodes["Item"], topics, similarity_edges_of(graph, "II"), tt,
                           label_edges_of(graph, "IT"), cfg)
    dt, _ = confirm_labels(graph.nodes["Doc"], topics, similarity_edges_of(graph, "DD"), tt,
                           label_edges_of(graph, "DT"), cfg)
    return graph.with_labels(it=it, dt=dt)


# --- labels file ----------------------------------------------------------------


def read_labels(path: str | Path) -> list[LabelEdge]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                r = json.loads(line)
                out.append(LabelEdge(r["unit"], r["topic"], float(r.get("weight", 1.0)),
                                     Status(r.get("status", "Known"))))
            except (json.JSONDecodeError, KeyError, ValueError) as e:
                raise ParseError(f"{path}:{lineno}: {e}") from e
    return out


def write_labels(path: str | Path, labels: Iterable[LabelEdge]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for l in sorted(labels, key=lambda l: (l.unit, l.topic)):
            rec = {"unit": l.unit, "topic": l.topic, "weight": l.weight, "status": l.status.value}
            fh.write(json.dumps(rec) + "\n")
