import csv
import warnings

import pytest
from hypothesis import given, strategies as st

from hinet.errors import DegenerateZero, SizeMismatch
from hinet.metrics import (
    PrecisionReport,
    TimingRecord,
    TopicRow,
    accuracy_n,
    e_time,
    f1_score,
    predicted_topics,
    time_improvement,
    topic_precision,
    write_metric_rows,
    write_precision_table,
)
from hinet.propagate import LabelEdge, Status


def ids(prefix, n):
    return [f"{prefix}{i}" for i in range(n)]


def test_time_improvement():
    assert time_improvement(TimingRecord(t_wmd=100, t_screened=50)) == 0.5
    assert time_improvement(TimingRecord(t_wmd=3.0, t_screened=3.0)) == 0.0
    assert time_improvement(TimingRecord(t_wmd=10.0, t_screened=9.0)) == pytest.approx(0.1)


def test_timing_must_be_positive():
    with pytest.raises(ValueError):
        TimingRecord(t_wmd=0.0)


def test_accuracy_n():
    a = ids("d", 20)
    assert accuracy_n(a, a) == 1.0
    assert accuracy_n(a, ids("x", 20)) == 0.0
    assert accuracy_n(a, a[:15] + ids("x", 5)) == 0.75
    with pytest.raises(SizeMismatch):
        accuracy_n(a[:19], a)
    with pytest.raises(SizeMismatch):
        accuracy_n(a, a + ["extra"])
    assert accuracy_n(a[:5], a[:5], n_ref=5) == 1.0


def test_f1():
    assert f1_score(0.5, 0.8) == pytest.approx(0.6154, abs=1e-4)
    assert f1_score(0.3, 0.3) == pytest.approx(0.3)
    assert f1_score(0.0, 0.7) == 0.0
    with pytest.raises(DegenerateZero):
        f1_score(0.0, 0.0)


@given(st.floats(0, 1), st.floats(0, 1))
def test_f1_bounds(ti, acc):
    if ti == 0 and acc == 0:
        return
    f = f1_score(ti, acc)
    assert f <= 2 * min(ti, acc) + 1e-12
    assert f <= max(ti, acc) + 1e-12


def test_e_time():
    assert e_time(TimingRecord(t_strategy=2.5, t_fullsort=2.5)) == 1.0
    assert e_time(TimingRecord(t_strategy=0.925, t_fullsort=1.0)) == 0.925


def holdout_for(topic, n):
    return [LabelEdge(u, topic, 1.0) for u in ids(topic + "_", n)]


def test_precision_table_rows():
    hold = holdout_for("T1", 17) + holdout_for("T4", 67)
    inferred = [LabelEdge(l.unit, l.topic, 0.8, Status.CONFIRMED) for l in hold]
    # two of topic 1's units are assigned elsewhere
    for l in hold[:2]:
        inferred.append(LabelEdge(l.unit, "T9", 0.9, Status.CONFIRMED))
    rep = topic_precision(hold, inferred)
    assert round(100 * rep.row("T1").precision, 2) == 88.24
    assert rep.row("T4").precision == 1.0


def test_zero_correct():
    hold = holdout_for("T1", 3)
    assert topic_precision(hold, []).row("T1").precision == 0.0


def test_perfect_inference():
    hold = holdout_for("T1", 4) + holdout_for("T2", 2)
    rep = topic_precision(hold, hold)
    assert all(r.precision == 1.0 for r in rep.rows)
    assert rep.macro_precision == 1.0


def test_topic_without_test_units_is_omitted():
    hold = holdout_for("T1", 2)
    training = [LabelEdge("a", "T2", 1.0), LabelEdge("b", "T1", 1.0)]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rep = topic_precision(hold, hold, training)
    assert rep.omitted == ["T2"] and [r.topic for r in rep.rows] == ["T1"]
    assert any("T2" in str(w.message) for w in caught)


def test_prediction_ties_go_to_lower_topic():
    inferred = [LabelEdge("u", "T2", 0.5), LabelEdge("u", "T1", 0.5), LabelEdge("v", "T3", 0.2),
                LabelEdge("v", "T1", 0.4)]
    assert predicted_topics(inferred) == {"u": "T1", "v": "T1"}


def test_macro_and_micro():
    rep = PrecisionReport([TopicRow("a", 10, 10, 10), TopicRow("b", 5, 2, 1)])
    assert rep.macro_precision == 0.75
    assert rep.micro_precision == 11 / 12


def test_csv_outputs(tmp_path):
    write_metric_rows(tmp_path / "m.csv", [("ti", "N=500", 0.5)])
    assert list(csv.reader(open(tmp_path / "m.csv"))) == [["metric", "parameters", "value"],
                                                          ["ti", "N=500", "0.5"]]
    rep = PrecisionReport([TopicRow("T1", 22, 17, 15), TopicRow("T4", 67, 67, 67)])
    write_precision_table(tmp_path / "p.csv", rep)
    rows = list(csv.reader(open(tmp_path / "p.csv")))
    assert rows[1] == ["T1", "22", "17", "15", "88.24"]
    assert rows[3][0] == "Average" and rows[4][0] == "Pooled"
    assert rows[4][1:] == ["89", "84", "82", "97.62"]
