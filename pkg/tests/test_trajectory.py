import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import stay
from lowpoi.cluster import dbscan_poi
from lowpoi.model import PoiCluster, ValidationError, Visit
from lowpoi.trajectory import build_trajectory


def test_visits_follow_cluster_labels():
    a = stay(0, 0, 20.0, t0=0, dur=2000)
    b = stay(3000, 0, 20.0, t0=3000, dur=2000)
    clusters = [PoiCluster(1, (a,), "u1"), PoiCluster(2, (b,), "u1")]
    tr = build_trajectory([b, a], clusters)
    assert tr.user_id == "u1"
    assert tr.visits == (Visit(1, 0, 2000), Visit(2, 3000, 5000))


def test_short_gap_same_cluster_merges():
    a = stay(0, 0, 20.0, t0=0, dur=2000)
    b = stay(10, 0, 20.0, t0=2100, dur=2000)
    tr = build_trajectory([a, b], [PoiCluster(1, (a, b), "u1")], slot_len=300)
    assert tr.visits == (Visit(1, 0, 4100),)


def test_long_gap_same_cluster_stays_split():
    a = stay(0, 0, 20.0, t0=0, dur=2000)
    b = stay(10, 0, 20.0, t0=2300, dur=2000)
    tr = build_trajectory([a, b], [PoiCluster(1, (a, b), "u1")], slot_len=300)
    assert len(tr.visits) == 2


def test_empty_and_unassigned():
    assert build_trajectory([], [], user_id="u").visits == ()
    with pytest.raises(ValidationError, match="no cluster"):
        build_trajectory([stay()], [])


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 30))
def test_visits_disjoint_sorted_and_cover_stays(seed, n):
    rng = np.random.default_rng(seed)
    sps, t = [], 0
    for _ in range(n):
        t += int(rng.integers(1, 900))
        dur = int(rng.integers(1900, 6000))
        sps.append(stay(rng.integers(0, 3) * 1000.0, 0, 30.0, t0=t, dur=dur))
        t += dur
    tr = build_trajectory(sps, dbscan_poi(sps), user_id="u1")
    for v, w in zip(tr.visits, tr.visits[1:]):
        assert v.t_depart < w.t_arrive
    assert len(tr.visits) <= n
    for s in sps:
        assert any(v.t_arrive <= s.t_arrive and s.t_depart <= v.t_depart for v in tr.visits)
