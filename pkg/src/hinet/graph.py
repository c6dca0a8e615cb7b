"""The assembled heterogeneous network and its JSON Lines serialization.

File layout: one header record, then node records sorted by (kind, id), then
edge records sorted by (kind, src, dst)::

    {"schema": "hin/1", "f": 64, "config_hash": "..."}
    {"node": "Doc", "id": "d001"}
    {"edge": "DD", "src": "d001", "dst": "d002", "weight": 0.61, "distance": 0.63}
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .errors import (
    GraphIntegrityError,
    MultiParentItem,
    OrphanEndpoint,
    ParentlessItem,
    ParseError,
    SchemaVersionMismatch,
    TypingViolation,
)
from .propagate import LabelEdge, Status
from .relational import SimilarityEdge
from .segment import ContainmentEdge

SCHEMA = "hin/1"
NODE_KINDS = ("Doc", "Item", "Topic")
EDGE_TYPES = {
    "DD": ("Doc", "Doc"),
    "DI": ("Doc", "Item"),
    "DT": ("Doc", "Topic"),
    "II": ("Item", "Item"),
    "IT": ("Item", "Topic"),
    "TT": ("Topic", "Topic"),
}


class DuplicateEdge(GraphIntegrityError):
    pass


@dataclass(frozen=True)
class Edge:
    kind: str
    src: str
    dst: str
    weight: float
    distance: float | None = None
    status: str | None = None


@dataclass(frozen=True)
class HinGraph:
    nodes: dict[str, tuple[str, ...]]
    edges: dict[str, tuple[Edge, ...]]
    meta: dict = field(default_factory=dict)

    def with_labels(self, it: Iterable[LabelEdge] | None = None,
                    dt: Iterable[LabelEdge] | None = None) -> "HinGraph":
        edges = dict(self.edges)
        if it is not None:
            edges["IT"] = tuple(_label_edge("IT", l) for l in it)
        if dt is not None:
            edges["DT"] = tuple(_label_edge("DT", l) for l in dt)
        return assemble(self.nodes, edges, self.meta)

    def edge_count(self) -> int:
        return sum(len(v) for v in self.edges.values())


def _label_edge(kind: str, l: LabelEdge) -> Edge:
    return Edge(kind, l.unit, l.topic, l.weight, status=Status(l.status).value)


def _to_edge(kind: str, e) -> Edge:
    if isinstance(e, Edge):
        return e
    if isinstance(e, SimilarityEdge):
        return Edge(kind, e.src, e.dst, e.similarity, distance=e.distance)
    if isinstance(e, ContainmentEdge):
        return Edge(kind, e.doc_id, e.item_id, e.weight)
    if isinstance(e, LabelEdge):
        return _label_edge(kind, e)
    raise TypeError(f"cannot turn {type(e).__name__} into a {kind} edge")


def assemble(nodes: dict[str, Iterable[str]], edge_sets: dict[str, Iterable] | None = None,
             meta: dict | None = None) -> HinGraph:
    """Validate and freeze a network; raises on typing, referential or forest violations."""
    unknown = set(nodes) - set(NODE_KINDS)
    if unknown:
        raise TypingViolation("unknown node kinds", sorted(unknown))
    node_sets = {k: tuple(sorted(set(nodes.get(k, ())))) for k in NODE_KINDS}
    members = {k: set(v) for k, v in node_sets.items()}
    edge_sets = edge_sets or {}
    unknown = set(edge_sets) - set(EDGE_TYPES)
    if unknown:
        raise TypingViolation("unknown edge kinds", sorted(unknown))

    edges: dict[str, tuple[Edge, ...]] = {}
    orphans, mistyped, bad_weight, dupes = [], [], [], []
    for kind, (src_kind, dst_kind) in EDGE_TYPES.items():
        converted = sorted((_to_edge(kind, e) for e in edge_sets.get(kind, ())),
                           key=lambda e: (e.src, e.dst))
        seen = set()
        for e in converted:
            if e.kind != kind:
                mistyped.append((kind, e.kind, e.src, e.dst))
            for node_id, want in ((e.src, src_kind), (e.dst, dst_kind)):
                if node_id in members[want]:
                    continue
                if any(node_id in members[k] for k in NODE_KINDS):
                    mistyped.append((kind, e.src, e.dst))
                else:
                    orphans.append((kind, e.src, e.dst))
            if not (math.isfinite(e.weight) and 0.0 <= e.weight <= 1.0):
                bad_weight.append((kind, e.src, e.dst, e.weight))
            if (e.src, e.dst) in seen:
                dupes.append((kind, e.src, e.dst))
            seen.add((e.src, e.dst))
        edges[kind] = tuple(converted)

    if orphans:
        raise OrphanEndpoint("edge endpoints missing from the node sets", orphans)
    if mistyped:
        raise TypingViolation("edge endpoints of the wrong node kind", mistyped)
    if bad_weight:
        raise TypingViolation("edge weights must be finite and within [0, 1]", bad_weight)
    if dupes:
        raise DuplicateEdge("repeated edges", dupes)

    parents = Counter(e.dst for e in edges["DI"])
    multi = sorted(i for i, c in parents.items() if c > 1)
    if multi:
        raise MultiParentItem("items with more than one parent document", multi)
    parentless = sorted(members["Item"] - set(parents))
    if parentless:
        raise ParentlessItem("items without a parent document", parentless)
    return HinGraph(nodes=node_sets, edges=edges, meta=dict(meta or {}))


def similarity_edges_of(graph: HinGraph, kind: str) -> list[SimilarityEdge]:
    return [
        SimilarityEdge(e.src, e.dst, kind,
                       e.distance if e.distance is not None else 1.0 / e.weight - 1.0, e.weight)
        for e in graph.edges[kind]
    ]


def label_edges_of(graph: HinGraph, kind: str) -> list[LabelEdge]:
    return [LabelEdge(e.src, e.dst, e.weight, Status(e.status or "Known")) for e in graph.edges[kind]]


# --- serialization ------------------------------------------------------------


def _records(graph: HinGraph):
    header = {"schema": SCHEMA}
    header.update({k: v for k, v in graph.meta.items() if k != "schema"})
    yield header
    for kind in NODE_KINDS:
        for node_id in graph.nodes[kind]:
            yield {"node": kind, "id": node_id}
    for kind in sorted(EDGE_TYPES):
        for e in graph.edges[kind]:
            rec = {"edge": kind, "src": e.src, "dst": e.dst, "weight": e.weight}
            if e.distance is not None:
                rec["distance"] = e.distance
            if e.status is not None:
                rec["status"] = e.status
            yield rec


def dumps(graph: HinGraph) -> str:
    # float repr is the shortest string that reads back to the same double
    return "".join(json.dumps(r, sort_keys=True, ensure_ascii=False) + "\n" for r in _records(graph))


def save(graph: HinGraph, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(graph))


def loads(text: str) -> HinGraph:
    lines = [ln for ln in text.split("\n") if ln.strip()]
    if not lines:
        raise ParseError("empty graph file: missing header record")
    try:
        records = [json.loads(ln) for ln in lines]
    except json.JSONDecodeError as e:
        raise ParseError(f"malformed graph record: {e}") from e
    header = records[0]
    if not isinstance(header, dict) or "schema" not in header:
        raise ParseError("first record must be the header carrying 'schema'")
    if header["schema"] != SCHEMA:
        raise SchemaVersionMismatch(f"expected schema {SCHEMA!r}, found {header['schema']!r}")
    meta = {k: v for k, v in header.items() if k != "schema"}
    nodes: dict[str, list[str]] = {k: [] for k in NODE_KINDS}
    edges: dict[str, list[Edge]] = {k: [] for k in EDGE_TYPES}
    for n, r in enumerate(records[1:], 2):
        if "node" in r:
            if r["node"] not in nodes:
                raise ParseError(f"record {n}: unknown node kind {r['node']!r}")
            nodes[r["node"]].append(r["id"])
        elif "edge" in r:
            kind = r["edge"]
            if kind not in edges:
                raise ParseError(f"record {n}: unknown edge kind {kind!r}")
            try:
                edges[kind].append(Edge(kind, r["src"], r["dst"], float(r["weight"]),
                                        r.get("distance"), r.get("status")))
            except KeyError as e:
                raise ParseError(f"record {n}: missing field {e}") from e
        else:
            raise ParseError(f"record {n}: neither a node nor an edge")
    return assemble(nodes, edges, meta)


def load(path: str | Path) -> HinGraph:
    return loads(Path(path).read_text(encoding="utf-8"))
