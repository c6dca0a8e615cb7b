from collections import Counter

import pytest

from hinet.corpus import Kind, TextUnit
from hinet.relational import (
    SimilarityConfig,
    SimilarityEdge,
    build_similarity_graph,
    read_edges,
    similarity_from_distance,
    write_edges,
)
from hinet.synth import generate_flat


def docs(*texts, kind=Kind.DOC):
    return [TextUnit.from_text(f"u{i}", kind, t) for i, t in enumerate(texts)]


@pytest.fixture(scope="module")
def flat():
    return generate_flat(30, seed=4, length=12)


def test_similarity_from_distance():
    assert similarity_from_distance(0) == 1.0
    assert similarity_from_distance(1) == 0.5
    assert similarity_from_distance(0.3) > similarity_from_distance(0.4)
    with pytest.raises(ValueError):
        similarity_from_distance(-1)


def test_edge_rejects_self_loop_and_bad_kind():
    with pytest.raises(ValueError):
        SimilarityEdge("a", "a", "DD", 0.0, 1.0)
    with pytest.raises(ValueError):
        SimilarityEdge("a", "b", "DI", 0.0, 1.0)


def test_three_units_complete(flat):
    units, table = flat
    edges, skipped = build_similarity_graph(units[:3], table, n_top=2)
    assert not skipped
    assert {(e.src, e.dst) for e in edges} == {(a.id, b.id) for a in units[:3] for b in units[:3] if a != b}


def test_out_degree_one(flat):
    units, table = flat
    edges, _ = build_similarity_graph(units, table, n_top=1)
    assert Counter(e.src for e in edges) == Counter({u.id: 1 for u in units})


@pytest.mark.parametrize("n_top", [3, 10, 29, 50])
def test_out_degree_bound(flat, n_top):
    units, table = flat
    edges, _ = build_similarity_graph(units, table, n_top)
    deg = Counter(e.src for e in edges)
    assert all(deg[u.id] == min(n_top, len(units) - 1) for u in units)


def test_duplicates_have_unit_similarity(flat):
    units, table = flat
    twin = TextUnit.from_text("twin", Kind.DOC, units[0].raw_text)
    edges, _ = build_similarity_graph([units[0], twin, units[1]], table, n_top=2)
    e = next(e for e in edges if (e.src, e.dst) == (units[0].id, "twin"))
    assert e.distance == 0.0 and e.similarity == 1.0


def test_directed_edges_need_not_be_mutual(flat):
    units, table = flat
    edges, _ = build_similarity_graph(units, table, n_top=2)
    pairs = {(e.src, e.dst) for e in edges}
    assert any((b, a) not in pairs for a, b in pairs)


def test_full_capacity_recall(flat):
    units, table = flat
    full, _ = build_similarity_graph(units, table, len(units) - 1)
    for strategy in ("replace", "fullsort"):
        again, _ = build_similarity_graph(units, table, len(units) - 1, SimilarityConfig(strategy=strategy))
        assert again == full
    by_src = {}
    for e in full:
        by_src.setdefault(e.src, []).append((e.distance, e.dst))
    assert all(len(v) == len(units) - 1 for v in by_src.values())


def test_degenerate_units_skipped(flat):
    units, table = flat
    odd = TextUnit.from_text("odd", Kind.DOC, "qqqq zzzz")
    edges, skipped = build_similarity_graph(units[:4] + [odd], table, n_top=3)
    assert skipped == ["odd"]
    assert all("odd" not in (e.src, e.dst) for e in edges)


def test_mixed_kinds_rejected(flat):
    units, table = flat
    with pytest.raises(ValueError):
        build_similarity_graph(units[:2] + docs("x", kind=Kind.ITEM), table, 2)


def test_small_topic_sets_weigh_all_pairs(flat):
    units, table = flat
    topics = [TextUnit.from_text(f"T{i}", Kind.TOPIC, u.raw_text) for i, u in enumerate(units[:5])]
    edges, _ = build_similarity_graph(topics, table, n_top=3)
    assert len(edges) == 5 * 4
    assert {e.kind for e in edges} == {"TT"}


def test_reproducible_and_parallel(flat):
    units, table = flat
    one, _ = build_similarity_graph(units, table, 5)
    two, _ = build_similarity_graph(units, table, 5)
    par, _ = build_similarity_graph(units, table, 5, SimilarityConfig(threads=2))
    assert one == two == par


def test_edge_file_round_trip(tmp_path, flat):
    units, table = flat
    edges, _ = build_similarity_graph(units[:6], table, 3)
    write_edges(tmp_path / "e.jsonl", edges)
    assert read_edges(tmp_path / "e.jsonl") == edges
