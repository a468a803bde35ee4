from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from osncensus.model import EdgeStore, MemberStore
from osncensus.ties import (STATUS_PAIRS, age_gap_histogram, gap_share, gender_mixing,
                            mixing_report, status_mixing)

from conftest import member, random_pairs, random_store
from oracles import mixing_by_enumeration


def test_single_cross_edge():
    store = MemberStore([member(1, gender="M"), member(2, gender="F")])
    assert gender_mixing(store, EdgeStore([(1, 2)])) == {"MM": 0, "FF": 0, "MF": 1}


def test_triangle():
    store = MemberStore([member(1, gender="M"), member(2, gender="F"), member(3, gender="M")])
    g = gender_mixing(store, EdgeStore([(1, 2), (2, 3), (1, 3)]))
    assert g == {"MM": 1, "FF": 0, "MF": 2}


def test_order_invariance():
    # the same tie stored from either endpoint's perspective classifies alike
    a = MemberStore([member(1, gender="F"), member(2, gender="M")])
    b = MemberStore([member(1, gender="M"), member(2, gender="F")])
    e = EdgeStore([(1, 2)])
    assert gender_mixing(a, e) == gender_mixing(b, e)


def test_gap_examples():
    store = MemberStore([member(1, 25), member(2, 25)])
    assert age_gap_histogram(store, EdgeStore([(1, 2)])).tolist() == [1]
    store = MemberStore([member(1, 20), member(2, 23), member(3, 31)])
    hist = age_gap_histogram(store, EdgeStore([(1, 2), (2, 3), (1, 3)]))
    assert {g: int(c) for g, c in enumerate(hist) if c} == {3: 1, 8: 1, 11: 1}


def test_max_gap_is_47():
    store = MemberStore([member(1, 18), member(2, 65)])
    assert age_gap_histogram(store, EdgeStore([(1, 2)])).size == 48


def test_status_examples():
    store = MemberStore([member(1, status="single"), member(2, status="single"),
                         member(3, status="married")])
    s = status_mixing(store, EdgeStore([(1, 2)]))
    assert s[("single", "single")] == 1 and sum(s.values()) == 1
    s = status_mixing(store, EdgeStore([(1, 3), (2, 3)]))
    assert s[("single", "married")] == 2
    assert len(STATUS_PAIRS) == 10


def test_gap_share_examples():
    assert gap_share([5], 10) == 1.0
    assert gap_share(np.ones(48), 10) == pytest.approx(11 / 48, abs=1e-15)
    assert gap_share([1, 2, 3], 99) == 1.0
    with pytest.raises(ValueError):
        gap_share([], 10)
    with pytest.raises(ValueError):
        gap_share([0, 0], 10)


def test_skips_unresolved():
    store = MemberStore([member(1), member(2)])
    r = mixing_report(store, EdgeStore([(1, 2), (2, 7), (8, 9)]))
    assert r.total_edges_analyzed == 1 and r.edges_skipped == 2


def test_random_500_node_brute_force():
    rng = np.random.default_rng(9)
    store = random_store(rng, 500)
    pairs = random_pairs(rng, 520, 3000)  # some endpoints fall outside the store
    r = mixing_report(store, EdgeStore(pairs))
    gender, gaps, statuses, skipped = mixing_by_enumeration(store, pairs.tolist())
    assert r.gender_pairs == gender
    assert r.edges_skipped == skipped > 0
    assert {g: int(c) for g, c in enumerate(r.age_gap_histogram) if c} == dict(gaps)
    assert {k: v for k, v in r.status_pairs.items() if v} == dict(statuses)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32), st.integers(2, 80))
def test_partitions_agree(seed, n):
    rng = np.random.default_rng(seed)
    store = random_store(rng, n)
    edges = EdgeStore(random_pairs(rng, n + 3, 3 * n))
    r = mixing_report(store, edges)
    t = r.total_edges_analyzed
    assert sum(r.gender_pairs.values()) == t
    assert r.age_gap_histogram.sum() == t
    assert sum(r.status_pairs.values()) == t
    assert t == len(edges) - r.edges_skipped


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32))
def test_relabeling_invariance(seed):
    rng = np.random.default_rng(seed)
    n = 60
    store = random_store(rng, n)
    pairs = random_pairs(rng, n, 150)
    perm = rng.permutation(n) + 1000
    relabel = dict(zip(range(1, n + 1), perm.tolist()))
    store2 = MemberStore(replace(r, account_id=relabel[r.account_id]) for r in store)
    pairs2 = np.sort(np.vectorize(relabel.get)(pairs), axis=1)
    pairs2 = pairs2[np.lexsort((pairs2[:, 1], pairs2[:, 0]))]
    a = mixing_report(store, EdgeStore(pairs))
    b = mixing_report(store2, EdgeStore(pairs2))
    assert a.gender_pairs == b.gender_pairs
    assert a.status_pairs == b.status_pairs
    np.testing.assert_array_equal(a.age_gap_histogram, b.age_gap_histogram)


def test_report_outputs():
    store = MemberStore([member(1, 20, "M"), member(2, 30, "F"), member(3, 21, "F")])
    r = mixing_report(store, EdgeStore([(1, 2), (1, 3)]))
    d = r.to_dict()
    assert d["gender_pairs"] == {"MM": 0, "FF": 0, "MF": 2}
    assert d["gap_share"] == {"5": 0.5, "10": 1.0}
    assert d["mf_share"] == 1.0
    assert r.histogram_csv().splitlines()[:3] == ["gap,count", "0,0", "1,1"]
    assert r.scalars()["gap_share[<=5]"] == 0.5


def test_report_empty():
    r = mixing_report(MemberStore([member(1)]), EdgeStore())
    assert r.total_edges_analyzed == 0
    assert r.to_dict()["gap_share"] == {}
