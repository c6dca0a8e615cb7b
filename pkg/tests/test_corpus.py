import json
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hinet.corpus import (
    Kind,
    TextUnit,
    TokenizerConfig,
    read_corpus,
    read_topics,
    to_nbow,
    tokenize,
)
from hinet.errors import DegenerateDocument, ParseError


def test_tokenize_counts_repeats():
    assert tokenize("the cat the") == Counter({"the": 2, "cat": 1})


def test_tokenize_empty():
    assert tokenize("") == Counter()


def test_tokenize_lowercases():
    assert tokenize("Cat cat CAT") == Counter({"cat": 3})
    assert tokenize("Cat cat", TokenizerConfig(lowercase=False)) == Counter({"Cat": 1, "cat": 1})


def test_tokenize_unicode_and_stopwords():
    rules = TokenizerConfig(stopwords=frozenset({"the"}))
    assert tokenize("The Größe, the naïve-word", rules) == Counter({"größe": 1, "naïve": 1, "word": 1})


def test_nbow_weights(small_table):
    v = to_nbow({"a": 1, "b": 3}, small_table)
    assert v.as_dict() == {0: 0.25, 1: 0.75}


def test_nbow_single_token(small_table):
    assert to_nbow({"a": 2}, small_table).as_dict() == {0: 1.0}


def test_nbow_drops_oov_and_renormalizes(small_table):
    assert to_nbow({"a": 1, "zzz_oov": 1}, small_table).as_dict() == {0: 1.0}


def test_nbow_all_oov_is_degenerate(small_table):
    with pytest.raises(DegenerateDocument):
        to_nbow({"zzz": 4}, small_table)
    with pytest.raises(DegenerateDocument):
        to_nbow({}, small_table)


counts_st = st.dictionaries(st.sampled_from("abcdxyz"), st.integers(1, 50), min_size=1)


@given(counts_st, st.integers(1, 20))
def test_nbow_scale_invariant_and_normalized(small_table, counts, k):
    if not set(counts) & set("abcd"):
        return
    v = to_nbow(counts, small_table)
    assert abs(v.weights.sum() - 1.0) <= 1e-9
    assert v.weights.min() > 0
    w = to_nbow({t: k * c for t, c in counts.items()}, small_table)
    assert np.array_equal(v.indices, w.indices)
    np.testing.assert_allclose(v.weights, w.weights, rtol=0, atol=1e-15)


@given(st.text(max_size=200))
def test_tokenize_nbow_deterministic(small_table, text):
    a = tokenize(text)
    b = tokenize(text)
    assert a == b
    assert all(c >= 1 for c in a.values())


def test_text_unit_round_trips_raw_text():
    text = "1 Scope\r\nbody\n\n2 Terms\n"
    u = TextUnit.from_text("d", Kind.DOC, text)
    assert u.raw_text == text


def test_read_corpus_directory_and_jsonl(tmp_path):
    d = tmp_path / "docs"
    d.mkdir()
    (d / "b.txt").write_text("beta text", encoding="utf-8")
    (d / "a.txt").write_text("alpha text", encoding="utf-8")
    units = read_corpus(d)
    assert [u.id for u in units] == ["a", "b"]
    assert all(u.kind is Kind.DOC for u in units)

    p = tmp_path / "corpus.jsonl"
    p.write_text(json.dumps({"id": "x", "kind": "Doc", "text": "one\ntwo"}) + "\n", encoding="utf-8")
    (u,) = read_corpus(p)
    assert u.lines == ("one", "two")


def test_read_corpus_rejects_duplicates(tmp_path):
    p = tmp_path / "corpus.jsonl"
    rec = json.dumps({"id": "x", "kind": "Doc", "text": "t"})
    p.write_text(rec + "\n" + rec + "\n", encoding="utf-8")
    with pytest.raises(ParseError):
        read_corpus(p)


def test_read_topics_uses_description(tmp_path):
    p = tmp_path / "topics.jsonl"
    p.write_text(json.dumps({"id": "T1", "name": "pumps", "description": "pump seal"}) + "\n")
    (t,) = read_topics(p)
    assert t.kind is Kind.TOPIC and t.raw_text == "pump seal" and t.meta["name"] == "pumps"


@pytest.mark.parametrize("suffix", [".toml", ".json"])
def test_tokenizer_config_file(tmp_path, suffix):
    (tmp_path / "stop.txt").write_text("The\nof\n", encoding="utf-8")
    cfg = tmp_path / f"tok{suffix}"
    if suffix == ".toml":
        cfg.write_text('lowercase = true\nstopwords = "stop.txt"\n')
    else:
        cfg.write_text(json.dumps({"lowercase": True, "stopwords": "stop.txt"}))
    rules = TokenizerConfig.from_file(cfg)
    assert rules.stopwords == frozenset({"the", "of"})
    assert tokenize("The end of it", rules) == Counter({"end": 1, "it": 1})
