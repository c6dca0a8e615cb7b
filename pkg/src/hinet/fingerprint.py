"""SimHash fingerprints, Hamming distance, and bounded Top-N candidate selection.

Three selection strategies return the same candidates:

* ``topn_replace`` keeps an unordered set and evicts its farthest member when a
  strictly closer candidate arrives, rescanning the set for the new farthest.
* ``topn_window`` keeps a sorted window and inserts by shifting the tail.
* ``topn_fullsort`` sorts every distance, the baseline the other two beat.

Ties on distance go to the candidate seen first in the pool, so a pool
ordered by unit id gives "lower id wins" for the window and the full sort.
"""

from __future__ import annotations

import bisect
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import ParseError, WidthMismatch

_FNV = {
    32: (0x811C9DC5, 0x01000193),
    64: (0xCBF29CE484222325, 0x100000001B3),
    128: (0x6C62272E07BB014262B821756295C58D, 0x0000000001000000000000000000013B),
}

_POS_BITS = 40
_POS_MASK = (1 << _POS_BITS) - 1


@dataclass(frozen=True)
class HashSpec:
    """FNV-1a at the fingerprint width, over the UTF-8 bytes of a token."""

    f: int = 64
    name: str = "fnv1a"

    def __post_init__(self):
        if self.f not in _FNV:
            raise ValueError(f"fingerprint width must be one of {sorted(_FNV)}, got {self.f}")
        if self.name != "fnv1a":
            raise ValueError(f"unknown hash {self.name!r}")

    def __call__(self, token: str) -> int:
        h, prime = _FNV[self.f]
        mask = (1 << self.f) - 1
        for byte in token.encode("utf-8"):
            h = ((h ^ byte) * prime) & mask
        return h


@dataclass(frozen=True)
class Fingerprint:
    bits: int
    f: int = 64
    empty: bool = False

    def __post_init__(self):
        if not 0 <= self.bits < (1 << self.f):
            raise ValueError(f"bits do not fit in {self.f} bits")

    def hex(self) -> str:
        return format(self.bits, f"0{self.f // 4}x")


def simhash(counts: Mapping[str, int], f: int = 64, hasher: HashSpec | None = None) -> Fingerprint:
    hasher = hasher or HashSpec(f)
    if hasher.f != f:
        raise WidthMismatch(f"hash width {hasher.f} != fingerprint width {f}")
    acc = [0] * f
    for token, c in counts.items():
        h = hasher(token)
        for bit in range(f):
            acc[bit] += c if (h >> bit) & 1 else -c
    bits = 0
    for bit in range(f):
        if acc[bit] > 0:
            bits |= 1 << bit
    return Fingerprint(bits=bits, f=f, empty=not counts)


def hamming(a: Fingerprint, b: Fingerprint) -> int:
    if a.f != b.f:
        raise WidthMismatch(f"cannot compare {a.f}-bit and {b.f}-bit fingerprints")
    return (a.bits ^ b.bits).bit_count()


@dataclass
class CandidateSet:
    """Selected ``(pool position, distance)`` pairs, nearest first."""

    capacity: int
    entries: list[tuple[int, int]]

    def distances(self) -> list[int]:
        return sorted(d for _, d in self.entries)

    def positions(self) -> list[int]:
        return [p for p, _ in self.entries]


@dataclass
class OrderedWindow(CandidateSet):
    """A CandidateSet whose entries are kept in non-decreasing distance order."""


def _pool_bits(target: Fingerprint, pool: Sequence[Fingerprint | int]) -> list[int]:
    out = []
    for p in pool:
        if isinstance(p, Fingerprint):
            if p.f != target.f:
                raise WidthMismatch(f"pool fingerprint width {p.f} != target width {target.f}")
            out.append(p.bits)
        else:
            out.append(p)
    return out


def select_replace(target: int, pool: Sequence[int], k: int) -> list[tuple[int, int]]:
    """Lowliest-replace elimination over raw fingerprint ints.

    Returns unordered ``(position, distance)`` pairs. Distances are small
    ints, so a count per distance tracks the farthest member without a rescan.
    Among several members tied at the farthest distance the first one in slot
    order is evicted, so ids (but not distances) may differ from the other
    strategies when the k-th distance is tied.
    """
    if k < 1:
        raise ValueError("capacity must be >= 1")
    dists: list[int] = []
    where: list[int] = []
    count = [0] * (max(target.bit_length(), max(pool, default=0).bit_length()) + 1)
    worst = -1
    for pos, bits in enumerate(pool):
        d = (target ^ bits).bit_count()
        if len(dists) < k:
            dists.append(d)
            where.append(pos)
            count[d] += 1
            if d > worst:
                worst = d
        elif d < worst:
            # equal-distance newcomers are discarded
            i = dists.index(worst)
            dists[i] = d
            where[i] = pos
            count[worst] -= 1
            count[d] += 1
            while not count[worst]:
                worst -= 1
    return list(zip(where, dists))


def select_window(target: int, pool: Sequence[int], k: int) -> list[tuple[int, int]]:
    """Ordered-window filling over raw fingerprint ints; returns sorted pairs."""
    if k < 1:
        raise ValueError("capacity must be >= 1")
    dists: list[int] = []
    where: list[int] = []
    bisect_right = bisect.bisect_right
    for pos, bits in enumerate(pool):
        d = (target ^ bits).bit_count()
        if len(dists) < k:
            m = bisect_right(dists, d)
            dists.insert(m, d)
            where.insert(m, pos)
        elif d < dists[-1]:
            m = bisect_right(dists, d)
            dists.insert(m, d)
            where.insert(m, pos)
            dists.pop()
            where.pop()
    return list(zip(where, dists))


def select_fullsort(target: int, pool: Sequence[int], k: int) -> list[tuple[int, int]]:
    if k < 1:
        raise ValueError("capacity must be >= 1")
    # (distance, position) packed into one int so the sort compares plain ints
    keys = [((target ^ bits).bit_count() << _POS_BITS) | pos for pos, bits in enumerate(pool)]
    keys.sort()
    return [(key & _POS_MASK, key >> _POS_BITS) for key in keys[:k]]


def topn_replace(target: Fingerprint, pool: Sequence[Fingerprint | int], k: int) -> CandidateSet:
    pairs = select_replace(target.bits, _pool_bits(target, pool), k)
    return CandidateSet(capacity=k, entries=sorted(pairs, key=lambda e: (e[1], e[0])))


def topn_window(target: Fingerprint, pool: Sequence[Fingerprint | int], k: int) -> OrderedWindow:
    return OrderedWindow(capacity=k, entries=select_window(target.bits, _pool_bits(target, pool), k))


def topn_fullsort(target: Fingerprint, pool: Sequence[Fingerprint | int], k: int) -> CandidateSet:
    return CandidateSet(capacity=k, entries=select_fullsort(target.bits, _pool_bits(target, pool), k))


def window_insert(window: OrderedWindow, position: int, distance: int) -> bool:
    """Insert one candidate into an ordered window; returns whether it was kept.

    The newcomer goes right after the last slot whose distance is <= its own,
    the tail shifts right and anything past capacity drops off. A newcomer
    closer than every slot lands at the front; a non-full window always accepts.
    """
    slots = window.entries
    m = bisect.bisect_right([d for _, d in slots], distance)
    if m >= window.capacity:
        return False
    slots.insert(m, (position, distance))
    if len(slots) > window.capacity:
        slots.pop()
    return True


STRATEGIES = {
    "replace": select_replace,
    "window": select_window,
    "fullsort": select_fullsort,
}


# --- fingerprint cache ------------------------------------------------------


def write_fingerprints(path: str | Path, records: Iterable[tuple[str, str, Fingerprint]]) -> None:
    """Write ``(id, kind, fingerprint)`` records as JSON Lines."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for uid, kind, fp in records:
            rec = {"id": uid, "kind": kind, "f": fp.f, "bits": fp.hex(), "empty": fp.empty}
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def read_fingerprints(path: str | Path) -> list[tuple[str, str, Fingerprint]]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                fp = Fingerprint(int(rec["bits"], 16), int(rec["f"]), bool(rec.get("empty", False)))
                out.append((rec["id"], rec.get("kind", "Doc"), fp))
            except (json.JSONDecodeError, KeyError, ValueError) as e:
                raise ParseError(f"{path}:{lineno}: {e}") from e
    return out
