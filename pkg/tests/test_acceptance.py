"""Acceptance criteria, one test (or a small group) per criterion.

Run ``pytest tests/test_acceptance.py -v``; the terminal summary prints one
PASS/FAIL line per criterion together with the measured figures.
"""

import time
from collections import Counter
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hinet import pipeline
from hinet.bench import etime_report, tradeoff_sweep
from hinet.config import load_config
from hinet.corpus import NbowVector
from hinet.embedding import word_cost
from hinet.fingerprint import Fingerprint, hamming, topn_fullsort, topn_replace, topn_window
from hinet.graph import dumps, load, save
from hinet.propagate import PropagationConfig, Status, confirm_labels, propagate_from_items, \
    propagate_from_topics
from hinet.segment import SectionTriplet, extract_candidates, filter_noise, valid_successors
from hinet.synth import SynthConfig, generate, generate_flat, random_fingerprints
from hinet.transport import TransportProblem, solve_transport, wmd

from conftest import random_table
from oracles import random_problem, transport_oracle
from test_propagate import fig3


def nbow(rng, vocab, k):
    idx = np.sort(rng.choice(vocab, size=k, replace=False))
    w = rng.random(k) + 0.05
    return NbowVector(idx.astype(np.int64), w / w.sum())


@pytest.mark.criterion(1, "hamming(110, 011) = 2")
def test_c01_hamming_example():
    assert hamming(Fingerprint(0b110, 3), Fingerprint(0b011, 3)) == 2


@pytest.mark.criterion(2, "transport solver equals vertex-enumeration oracle, 500 problems <= 4x4")
def test_c02_oracle_equivalence(note):
    rng = np.random.default_rng(20240601)
    t0 = time.perf_counter()
    worst = 0.0
    for k in range(500):
        m, n = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        s, d, c = random_problem(rng, m, n, dim=None if k % 2 else 8)
        got = solve_transport(TransportProblem(s, d, c)).objective
        worst = max(worst, abs(got - transport_oracle(s, d, c)))
    elapsed = time.perf_counter() - t0
    note(f"max |solver - oracle| = {worst:.2e}, {elapsed:.1f} s")
    assert worst <= 1e-9
    assert elapsed < 10


@pytest.mark.criterion(3, "WMD symmetry, identity and triangle inequality on 200 random cases")
def test_c03_wmd_metric(note):
    rng = np.random.default_rng(3)
    table = random_table(60, 8, seed=33)
    t0 = time.perf_counter()
    sym = tri = 0.0
    for _ in range(200):
        a, b, c = (nbow(rng, 60, int(rng.integers(1, 11))) for _ in range(3))
        ab, ba = wmd(a, b, table), wmd(b, a, table)
        assert wmd(a, a, table) == 0.0
        sym = max(sym, abs(ab - ba))
        tri = max(tri, wmd(a, c, table) - ab - wmd(b, c, table))
    elapsed = time.perf_counter() - t0
    note(f"max asymmetry {sym:.1e}, max triangle excess {tri:.1e}, {elapsed:.1f} s")
    assert sym <= 1e-7
    assert tri <= 1e-6
    assert elapsed < 30


@pytest.mark.criterion(4, "single-word target closed form, 100 instances")
def test_c04_single_target():
    rng = np.random.default_rng(4)
    table = random_table(40, 8, seed=44)
    for _ in range(100):
        a = nbow(rng, 40, int(rng.integers(1, 11)))
        w = int(rng.integers(0, 40))
        b = NbowVector(np.array([w]), np.array([1.0]))
        expected = sum(float(x) * word_cost(table, int(i), w) for i, x in zip(a.indices, a.weights))
        assert abs(wmd(a, b, table) - expected) <= 1e-9


@pytest.mark.criterion(5, "replace / window / fullsort give identical distance multisets")
def test_c05_strategy_equivalence(note):
    t0 = time.perf_counter()
    for trial in range(50):
        pool = random_fingerprints(10_000, 64, seed=trial)
        target = Fingerprint(random_fingerprints(1, 64, seed=10_000 + trial)[0])
        k = (1, 10, 100, 1000)[trial % 4]
        ref = topn_fullsort(target, pool, k).distances()
        assert topn_replace(target, pool, k).distances() == ref
        assert topn_window(target, pool, k).distances() == ref
    elapsed = time.perf_counter() - t0
    note(f"50 trials in {elapsed:.1f} s")
    assert elapsed < 20


@pytest.mark.criterion(6, "N = pool size gives Accuracy_N = 1")
def test_c06_full_recall():
    docs, table = generate_flat(120, seed=6, length=16)
    (row,) = tradeoff_sweep(docs, table, grid=(len(docs) - 1,), queries=4, seed=6)
    assert row.accuracy == 1.0


@pytest.mark.slow
@pytest.mark.criterion(7, "TI falls and Accuracy_N rises with N on a 2,000-doc corpus")
def test_c07_tradeoff_trend(note):
    docs, table = generate_flat(2000, seed=7, length=24)
    t0 = time.perf_counter()
    rows = tradeoff_sweep(docs, table, grid=(250, 500, 1000, 1500), queries=5, seed=7)
    elapsed = time.perf_counter() - t0
    for r in rows:
        note(f"N={r.n_top:5d}  TI={r.ti:.3f}  Accuracy_N={r.accuracy:.3f}  F1={r.f1:.3f}")
    note(f"sweep took {elapsed:.0f} s")
    acc = [r.accuracy for r in rows]
    ti = [r.ti for r in rows]
    assert all(a <= b for a, b in zip(acc, acc[1:]))
    assert all(a >= b for a, b in zip(ti, ti[1:]))
    assert elapsed < 600


@pytest.mark.slow
@pytest.mark.criterion(8, "E-Time ordering: window <= replace <= fullsort (10^6 fingerprints, k=1500)")
def test_c08_etime_order(note):
    pool = random_fingerprints(1_000_000, 64, seed=8)
    target = random_fingerprints(1, 64, seed=88)[0]
    rep = etime_report(pool, target, 1500, repeats=31)
    note("E-Time " + ", ".join(f"{k}={v:.3f}" for k, v in sorted(rep.items())))
    assert rep["window"] <= rep["replace"] <= 1.0


def _recovery(noise, seed):
    corpus = generate(SynthConfig(seed=seed, n_docs=200, noise=noise))
    exact = sum(
        [(t.no, t.line) for t in filter_noise(extract_candidates(d))] == corpus.planted[d.id]
        for d in corpus.docs
    )
    return exact / len(corpus.docs)


@pytest.mark.criterion(9, "segmenter: 100% on clean noise, >= 97% on adversarial noise")
def test_c09_segmenter(note):
    # adversarial rows labelled with a valid next number are indistinguishable from
    # headers, so one 200-document batch is a noisy sample; estimate over ten fixed batches
    seeds = range(10)
    t0 = time.perf_counter()
    clean = [_recovery("clean", s) for s in seeds]
    adversarial = [_recovery("adversarial", s) for s in seeds]
    elapsed = time.perf_counter() - t0
    note("adversarial per batch: " + " ".join(f"{100 * a:.1f}" for a in adversarial))
    note(f"clean min {100 * min(clean):.1f}%, adversarial mean {100 * np.mean(adversarial):.2f}% "
         f"(worst batch {100 * min(adversarial):.1f}%), 10 x 200 documents in {elapsed:.1f} s")
    assert min(clean) == 1.0
    assert np.mean(adversarial) >= 0.97
    assert elapsed / len(seeds) < 30


_numbers = st.lists(st.integers(1, 4), min_size=1, max_size=4).map(tuple)
_candidates = st.lists(st.tuples(_numbers, st.integers(0, 60)), max_size=30).map(
    lambda xs: [SectionTriplet(no[0], no, line) for no, line in xs]
)


@pytest.mark.criterion(10, "filter output obeys the three ordering rules, 1,000 random sequences")
@settings(max_examples=1000, deadline=None, database=None)
@given(_candidates)
def test_c10_filter_replay(cands):
    kept = filter_noise(cands)
    for a, b in zip(kept, kept[1:]):
        assert b.no in valid_successors(a.no)
    for i, b in enumerate(kept):
        for a in kept[:i]:
            assert a.no < b.no and a.cap <= b.cap and a.line < b.line


@pytest.mark.criterion(11, "propagation trace on the four-item, five-topic example gives 0.51")
def test_c11_trace():
    ii, tt, labels = fig3()
    loose = PropagationConfig(theta=1e-9)
    (e,) = propagate_from_items("I3", ii, labels, loose)
    assert abs(e.weight - 0.51) <= 1e-12
    (e,) = propagate_from_topics("T5", tt, labels, loose)
    assert abs(e.weight - (0.7 * 0.9 + 0.4 * 0.6) / 2) <= 1e-12
    out, _ = confirm_labels(["I1", "I2", "I3", "I4"], [f"T{i}" for i in range(1, 6)], ii, tt, labels)
    assert {(l.unit, l.topic) for l in out if l.status is Status.CONFIRMED} == {("I3", "T3"), ("I2", "T5")}


@pytest.fixture(scope="module")
def built(tmp_path_factory):
    """A 40-document synthetic corpus pushed through every pipeline stage."""
    root = tmp_path_factory.mktemp("acceptance")
    t0 = time.perf_counter()
    cfg_path = pipeline.synth_stage(root, load_config(None).with_overrides(seed=0), n_docs=40)
    cfg = load_config(cfg_path)
    pipeline.run_all(cfg)
    ws = pipeline.Workspace(cfg)
    pipeline.metrics_stage(ws)
    return ws, time.perf_counter() - t0


@pytest.mark.slow
@pytest.mark.criterion(12, "propagation precision >= 90% macro; heavy topics at or above average")
def test_c12_precision(built, note):
    import csv

    ws, elapsed = built
    rows = list(csv.DictReader(open(ws.path(pipeline.PRECISION))))
    per_topic = {r["topic"]: r for r in rows if r["topic"].startswith("T")}
    average = next(r for r in rows if r["topic"] == "Average")
    pooled = next(r for r in rows if r["topic"] == "Pooled")
    macro = float(average["precision_pct"])
    train = {t: int(r["training"]) for t, r in per_topic.items()}
    median = float(np.median(list(train.values())))
    heavy = sorted(t for t, n in train.items() if n >= 2 * median)
    light_mean = np.mean([n for t, n in train.items() if t not in heavy])
    for t, r in per_topic.items():
        note(f"{t}: training {r['training']:>3}, test {r['test']:>2}, correct {r['correct']:>2}, "
             f"{r['precision_pct']}%")
    note(f"heavy {heavy} at {min(train[t] for t in heavy) / light_mean:.1f}x the light mean")
    note(f"macro {macro:.2f}%, pooled {pooled['precision_pct']}%, {elapsed:.0f} s")
    assert len(per_topic) == 8
    assert macro >= 90.0
    assert heavy
    for t in heavy:
        assert float(per_topic[t]["precision_pct"]) >= macro
    assert elapsed < 300


@pytest.mark.slow
@pytest.mark.criterion(13, "graph save/load identity and byte-canonical double save")
def test_c13_round_trip(built, tmp_path):
    ws, _ = built
    g = load(ws.path(pipeline.GRAPH))
    assert dumps(g) == ws.path(pipeline.GRAPH).read_text(encoding="utf-8")
    save(g, tmp_path / "one.jsonl")
    save(load(tmp_path / "one.jsonl"), tmp_path / "two.jsonl")
    assert load(tmp_path / "one.jsonl") == g
    assert (tmp_path / "one.jsonl").read_bytes() == (tmp_path / "two.jsonl").read_bytes()
    assert Counter(e.status for e in g.edges["IT"])["Confirmed"] > 0


@pytest.mark.criterion(14, "two full runs with the same seed and config give byte-identical graphs")
def test_c14_determinism(tmp_path):
    graphs = []
    for name in ("first", "second"):
        cfg_path = pipeline.synth_stage(tmp_path / name, load_config(None).with_overrides(seed=14, n_top=10),
                                        n_docs=8)
        graphs.append(pipeline.run_all(load_config(cfg_path)).read_bytes())
    assert graphs[0] == graphs[1]
    assert graphs[0].count(b'"edge"') > 0
