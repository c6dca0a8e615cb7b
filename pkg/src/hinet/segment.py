"""Split documents into numbered clauses (Items) using their section headers."""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import Kind, TextUnit
from .errors import ParseError

log = logging.getLogger(__name__)

MAX_DEPTH = 6

_HEADER = re.compile(r"^[ \t]*(\d+(?:\.\d+)*)\.?[ \t]+(\S.*?)\s*$")


@dataclass(frozen=True)
class SectionTriplet:
    cap: int
    no: tuple[int, ...]
    line: int
    title: str = ""

    def __post_init__(self):
        if not self.no or any(c < 1 for c in self.no):
            raise ValueError(f"invalid section number {self.no}")
        if self.cap != self.no[0]:
            raise ValueError(f"chapter {self.cap} does not lead section number {self.no}")

    @property
    def section(self) -> str:
        return ".".join(map(str, self.no))


@dataclass(frozen=True)
class ContainmentEdge:
    doc_id: str
    item_id: str
    weight: float = 1.0


def parse_header(text: str) -> tuple[tuple[int, ...], str] | None:
    m = _HEADER.match(text)
    if not m:
        return None
    no = tuple(int(c) for c in m.group(1).split("."))
    if len(no) > MAX_DEPTH or any(c < 1 for c in no):
        return None
    return no, m.group(2)


def extract_candidates(doc: TextUnit) -> list[SectionTriplet]:
    out = []
    for i, line in enumerate(doc.lines):
        parsed = parse_header(line)
        if parsed:
            no, title = parsed
            out.append(SectionTriplet(no[0], no, i, title))
    return out


def valid_successors(no: Sequence[int]) -> set[tuple[int, ...]]:
    """Numbers that may follow ``no``: its first child, or the next sibling at any level.

    For 2.2 this gives {2.2.1, 2.3, 3}.
    """
    no = tuple(no)
    out = {no + (1,)}
    for j in range(1, len(no) + 1):
        out.add(no[: j - 1] + (no[j - 1] + 1,))
    return out


def filter_noise(cands: Sequence[SectionTriplet]) -> list[SectionTriplet]:
    """Greedy forward scan dropping candidates that break the header ordering rules."""
    if not cands:
        return []
    start = next((i for i, t in enumerate(cands) if t.no == (1,)), 0)
    kept = [cands[start]]
    max_cap = cands[start].cap
    for t in cands[start + 1:]:
        last = kept[-1]
        if t.line <= last.line or t.cap < max_cap:
            continue
        if t.no not in valid_successors(last.no):
            continue
        kept.append(t)
        max_cap = max(max_cap, t.cap)
    return kept


def split_items(
    doc: TextUnit, headers: Sequence[SectionTriplet]
) -> tuple[list[TextUnit], list[ContainmentEdge]]:
    lines = [h.line for h in headers]
    if any(b <= a for a, b in zip(lines, lines[1:])):
        raise ValueError(f"{doc.id}: header line indices must be strictly increasing")
    if not headers:
        log.warning("%s: no section headers survived; the whole document becomes one item", doc.id)
        item = TextUnit(f"{doc.id}#0", Kind.ITEM, doc.lines,
                        meta={"doc": doc.id, "section": "", "title": ""})
        return [item], [ContainmentEdge(doc.id, item.id)]
    items, edges = [], []
    bounds = lines + [len(doc.lines)]
    for h, start, end in zip(headers, bounds, bounds[1:]):
        item = TextUnit(
            f"{doc.id}#{h.section}", Kind.ITEM, doc.lines[start:end],
            meta={"doc": doc.id, "section": h.section, "title": h.title},
        )
        items.append(item)
        edges.append(ContainmentEdge(doc.id, item.id))
    return items, edges


def segment(doc: TextUnit) -> tuple[list[TextUnit], list[ContainmentEdge]]:
    return split_items(doc, filter_noise(extract_candidates(doc)))


# --- item dump ----------------------------------------------------------------


def write_items(path: str | Path, items: Iterable[TextUnit]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for it in items:
            rec = {"id": it.id, "doc": it.meta["doc"], "section": it.meta["section"],
                   "title": it.meta["title"], "text": it.raw_text}
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


def read_items(path: str | Path) -> list[TextUnit]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                r = json.loads(line)
                out.append(TextUnit.from_text(r["id"], Kind.ITEM, r["text"], doc=r["doc"],
                                              section=r["section"], title=r["title"]))
            except (json.JSONDecodeError, KeyError) as e:
                raise ParseError(f"{path}:{lineno}: {e}") from e
    return out
