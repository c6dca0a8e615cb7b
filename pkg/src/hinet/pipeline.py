"""File-backed pipeline stages.

Every stage reads its predecessors' artifacts from the work directory, writes
its own JSON Lines artifact and appends a line to ``manifest.jsonl``. Stages can
be rerun individually; identical inputs and parameters give identical files.
"""

from __future__ import annotations

import csv
import json
import logging
import time
from pathlib import Path

from .bench import etime_report, tradeoff_sweep
from .config import PipelineConfig
from .corpus import Kind, TextUnit, read_corpus, read_topics, to_nbow, tokenize
from .embedding import load_embeddings
from .errors import DegenerateDocument, MissingPredecessor, OrphanEndpoint, ParseError
from .fingerprint import HashSpec, read_fingerprints, simhash, write_fingerprints
from .graph import assemble, save
from .metrics import topic_precision, write_metric_rows, write_precision_table
from .propagate import PropagationConfig, Status, confirm_labels, read_labels, write_labels
from .relational import EDGE_KIND, all_pairs, read_edges, screen, weigh, write_edges
from .segment import ContainmentEdge, read_items, segment, write_items
from .synth import SynthConfig, generate, generate_flat, random_fingerprints

log = logging.getLogger(__name__)

UNITS = "units.jsonl"
LABELS = "labels.jsonl"
ITEMS = "items.jsonl"
CONTAINMENT = "containment.jsonl"
FINGERPRINTS = "fingerprints.jsonl"
CANDIDATES = "candidates.jsonl"
TOPIC_EDGES = "topic_edges.jsonl"
GRAPH = "graph.jsonl"
PRECISION = "precision.csv"
METRICS = "metrics.csv"
BENCH = "bench.csv"
ETIME = "etime.csv"
MANIFEST = "manifest.jsonl"
KINDS = ("DD", "II", "TT")


def edges_file(kind: str) -> str:
    return f"edges_{kind.lower()}.jsonl"


class Workspace:
    def __init__(self, cfg: PipelineConfig):
        if cfg.workdir is None:
            raise MissingPredecessor("no work directory: pass --workdir or set HIN_WORKDIR")
        self.cfg = cfg
        self.root = Path(cfg.workdir)

    def path(self, name: str) -> Path:
        return self.root / name

    def need(self, *names: str) -> None:
        missing = [n for n in names if not self.path(n).exists()]
        if missing:
            raise MissingPredecessor(f"missing in {self.root}: {', '.join(missing)}")

    def record(self, command: str) -> None:
        entry = {"command": command, "config_hash": self.cfg.config_hash(),
                 "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z")}
        with open(self.path(MANIFEST), "a", encoding="utf-8", newline="\n") as fh:
            fh.write(json.dumps(entry, sort_keys=True) + "\n")


def _write_units(path: Path, units) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for u in units:
            rec = {"id": u.id, "kind": u.kind.value, "text": u.raw_text}
            if u.kind is Kind.TOPIC:
                rec["name"] = u.meta.get("name", u.id)
            fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")


def _read_units(path: Path) -> list[TextUnit]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                r = json.loads(line)
                meta = {"name": r["name"]} if "name" in r else {}
                out.append(TextUnit.from_text(r["id"], r["kind"], r["text"], **meta))
            except (json.JSONDecodeError, KeyError, ValueError) as e:
                raise ParseError(f"{path}:{lineno}: {e}") from e
    return out


def _all_units(ws: Workspace) -> list[TextUnit]:
    return _read_units(ws.path(UNITS)) + read_items(ws.path(ITEMS))


# --- stages -------------------------------------------------------------------


def ingest(ws: Workspace) -> None:
    cfg = ws.cfg
    cfg.require("corpus", "topics", "embeddings", "labels")
    docs = sorted(read_corpus(cfg.corpus), key=lambda u: u.id)
    topics = sorted(read_topics(cfg.topics), key=lambda u: u.id)
    load_embeddings(cfg.embeddings)  # fail early on a malformed table
    clash = sorted({d.id for d in docs} & {t.id for t in topics})
    if clash:
        raise ParseError(f"ids used by both a Doc and a Topic: {clash[:10]}")
    labels = read_labels(cfg.labels)
    topic_ids = {t.id for t in topics}
    unknown = sorted({l.topic for l in labels} - topic_ids)
    if unknown:
        raise OrphanEndpoint("labels name unknown topics", unknown)
    ws.root.mkdir(parents=True, exist_ok=True)
    _write_units(ws.path(UNITS), docs + topics)
    write_labels(ws.path(LABELS), labels)
    ws.record("ingest")


def segment_stage(ws: Workspace) -> None:
    ws.need(UNITS)
    items, edges = [], []
    for doc in _read_units(ws.path(UNITS)):
        if doc.kind is not Kind.DOC:
            continue
        its, es = segment(doc)
        items += its
        edges += es
    write_items(ws.path(ITEMS), items)
    with open(ws.path(CONTAINMENT), "w", encoding="utf-8", newline="\n") as fh:
        for e in edges:
            fh.write(json.dumps({"doc": e.doc_id, "item": e.item_id, "weight": e.weight}) + "\n")
    ws.record("segment")


def _read_containment(path: Path) -> list[ContainmentEdge]:
    with open(path, encoding="utf-8") as fh:
        return [ContainmentEdge(r["doc"], r["item"], float(r["weight"]))
                for r in map(json.loads, filter(str.strip, fh))]


def fingerprint_stage(ws: Workspace) -> None:
    """Fingerprints of every unit that has at least one in-vocabulary token."""
    ws.need(UNITS, ITEMS)
    cfg = ws.cfg
    table = load_embeddings(cfg.embeddings)
    hasher = HashSpec(cfg.f)
    records, skipped = [], []
    for u in sorted(_all_units(ws), key=lambda u: (u.kind.value, u.id)):
        counts = tokenize(u, cfg.tokenizer)
        try:
            to_nbow(counts, table)
        except DegenerateDocument:
            skipped.append(u.id)
            continue
        records.append((u.id, u.kind.value, simhash(counts, cfg.f, hasher)))
    if skipped:
        log.warning("%d unit(s) have no in-vocabulary token and are left out: %s",
                    len(skipped), ", ".join(skipped[:10]))
    write_fingerprints(ws.path(FINGERPRINTS), records)
    ws.record("fingerprint")


def screen_stage(ws: Workspace) -> None:
    ws.need(FINGERPRINTS)
    cfg = ws.cfg
    by_kind: dict[str, dict] = {}
    for uid, kind, fp in read_fingerprints(ws.path(FINGERPRINTS)):
        by_kind.setdefault(kind, {})[uid] = fp
    with open(ws.path(CANDIDATES), "w", encoding="utf-8", newline="\n") as fh:
        for kind in sorted(by_kind):
            fps = by_kind[kind]
            if kind == Kind.TOPIC.value and len(fps) < 2 * cfg.n_top:
                # a small topic set is weighed exhaustively
                cands = all_pairs(fps)
            else:
                cands = screen(fps, cfg.n_top, cfg.strategy)
            for uid in sorted(cands):
                rec = {"id": uid, "kind": kind, "candidates": [[v, d] for v, d in cands[uid]]}
                fh.write(json.dumps(rec) + "\n")
    ws.record("screen")


def similarity_stage(ws: Workspace, kind: str) -> None:
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    ws.need(UNITS, ITEMS, CANDIDATES)
    cfg = ws.cfg
    unit_kind = next(k for k, v in EDGE_KIND.items() if v == kind)
    table = load_embeddings(cfg.embeddings)
    candidates = {}
    with open(ws.path(CANDIDATES), encoding="utf-8") as fh:
        for r in map(json.loads, filter(str.strip, fh)):
            if r["kind"] == unit_kind.value:
                candidates[r["id"]] = [(v, d) for v, d in r["candidates"]]
    nbows = {u.id: to_nbow(tokenize(u, cfg.tokenizer), table)
             for u in _all_units(ws) if u.id in candidates}
    edges = weigh(candidates, nbows, table, kind, cfg.threads)
    write_edges(ws.path(edges_file(kind)), edges)
    ws.record(f"similarity {kind}")


def propagate_stage(ws: Workspace) -> None:
    ws.need(UNITS, ITEMS, LABELS, *(edges_file(k) for k in KINDS))
    cfg = ws.cfg
    pcfg = PropagationConfig(theta=cfg.theta, max_iters=cfg.max_iters, neighbor_cap=cfg.neighbor_cap)
    units = _read_units(ws.path(UNITS))
    doc_ids = [u.id for u in units if u.kind is Kind.DOC]
    topic_ids = [u.id for u in units if u.kind is Kind.TOPIC]
    item_ids = [u.id for u in read_items(ws.path(ITEMS))]
    labels = read_labels(ws.path(LABELS))
    docs, items = set(doc_ids), set(item_ids)
    orphans = sorted({l.unit for l in labels} - docs - items)
    if orphans:
        raise OrphanEndpoint("labels name units that are neither Docs nor Items", orphans)
    tt = read_edges(ws.path(edges_file("TT")))
    it, _ = confirm_labels(item_ids, topic_ids, read_edges(ws.path(edges_file("II"))), tt,
                           [l for l in labels if l.unit in items], pcfg)
    dt, _ = confirm_labels(doc_ids, topic_ids, read_edges(ws.path(edges_file("DD"))), tt,
                           [l for l in labels if l.unit in docs], pcfg)
    write_labels(ws.path(TOPIC_EDGES), it + dt)
    ws.record("propagate")


def assemble_stage(ws: Workspace) -> None:
    ws.need(UNITS, ITEMS, CONTAINMENT, TOPIC_EDGES, *(edges_file(k) for k in KINDS))
    units = _read_units(ws.path(UNITS))
    items = read_items(ws.path(ITEMS))
    nodes = {
        "Doc": [u.id for u in units if u.kind is Kind.DOC],
        "Item": [u.id for u in items],
        "Topic": [u.id for u in units if u.kind is Kind.TOPIC],
    }
    item_set = set(nodes["Item"])
    labels = read_labels(ws.path(TOPIC_EDGES))
    edge_sets = {k: read_edges(ws.path(edges_file(k))) for k in KINDS}
    edge_sets["DI"] = _read_containment(ws.path(CONTAINMENT))
    edge_sets["IT"] = [l for l in labels if l.unit in item_set]
    edge_sets["DT"] = [l for l in labels if l.unit not in item_set]
    meta = {"f": ws.cfg.f, "n_top": ws.cfg.n_top, "config_hash": ws.cfg.config_hash()}
    save(assemble(nodes, edge_sets, meta), ws.path(GRAPH))
    ws.record("assemble")


def metrics_stage(ws: Workspace) -> None:
    ws.need(ITEMS, LABELS, TOPIC_EDGES)
    ws.cfg.require("holdout")
    holdout = read_labels(ws.cfg.holdout)
    held = {l.unit for l in holdout}
    items = {u.id for u in read_items(ws.path(ITEMS))}
    # training counts come from units of the same kind as the held-out ones
    same_kind = items if held <= items else None
    training = [l for l in read_labels(ws.path(LABELS))
                if same_kind is None or l.unit in same_kind]
    inferred = [l for l in read_labels(ws.path(TOPIC_EDGES))
                if l.status is not Status.KNOWN and l.unit in held]
    report = topic_precision(holdout, inferred, training)
    write_precision_table(ws.path(PRECISION), report)
    rows = [("precision", f"topic={r.topic}", r.precision) for r in report.rows]
    rows += [("macro_precision", "", report.macro_precision),
             ("micro_precision", "", report.micro_precision)]
    write_metric_rows(ws.path(METRICS), rows)
    ws.record("metrics")


def bench_stage(ws: Workspace, etime: bool = False) -> None:
    cfg = ws.cfg
    b = cfg.bench
    ws.root.mkdir(parents=True, exist_ok=True)
    docs, table = generate_flat(b.n_docs, seed=cfg.seed, length=b.doc_length)
    rows = tradeoff_sweep(docs, table, b.grid, b.queries, cfg.seed, cfg.f, cfg.strategy, cfg.tokenizer)
    with open(ws.path(BENCH), "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n_top", "ti", "accuracy_n", "f1", "t_wmd", "t_screened"])
        for r in rows:
            w.writerow([r.n_top, repr(r.ti), repr(r.accuracy), repr(r.f1), repr(r.t_wmd),
                        repr(r.t_screened)])
    if etime:
        pool = random_fingerprints(b.etime_pool, cfg.f, cfg.seed)
        target = random_fingerprints(1, cfg.f, cfg.seed + 1)[0]
        report = etime_report(pool, target, b.etime_k, b.repeats)
        write_metric_rows(ws.path(ETIME), [("e_time", f"strategy={name},k={b.etime_k},pool={b.etime_pool}",
                                            v) for name, v in report.items()])
    ws.record("bench")


def synth_stage(out: Path, cfg: PipelineConfig, n_docs: int = 40, noise: str = "clean",
                as_directory: bool = False) -> Path:
    """Write a seeded corpus plus a ``hinet.toml`` that points at it."""
    from .config import dump_toml

    corpus = generate(SynthConfig(seed=cfg.seed, n_docs=n_docs, noise=noise))
    out = Path(out)
    corpus.write(out, as_directory=as_directory)
    paths = {
        "corpus": out / ("docs" if as_directory else "corpus.jsonl"),
        "topics": out / "topics.jsonl",
        "embeddings": out / "embeddings.txt",
        "labels": out / "labels.jsonl",
        "holdout": out / "holdout.jsonl",
        "workdir": out / "work",
    }
    cfg = cfg.with_overrides(**paths)
    (out / "hinet.toml").write_text(dump_toml(cfg, relative_to=out), encoding="utf-8")
    return out / "hinet.toml"


def run_all(cfg: PipelineConfig) -> Path:
    """Every graph-building stage in order; returns the graph file."""
    ws = Workspace(cfg)
    ingest(ws)
    segment_stage(ws)
    fingerprint_stage(ws)
    screen_stage(ws)
    for kind in KINDS:
        similarity_stage(ws, kind)
    propagate_stage(ws)
    assemble_stage(ws)
    return ws.path(GRAPH)
