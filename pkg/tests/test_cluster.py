import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import stay
from lowpoi.cluster import (davies_bouldin, dbscan_labels, dbscan_poi, hierarchical_poi, kmeans_poi,
                            reachability_graph)
from lowpoi.model import PipelineConfig
from oracles import (davies_bouldin_loops, distance_graph_partition, partition_of, reach_edges,
                     union_find_partition)

CFG = PipelineConfig()


def test_close_pair_within_summed_accuracy_merges():
    sps = [stay(0, 0, 40.0, 0), stay(50, 0, 30.0, 5000)]
    clusters = dbscan_poi(sps, CFG)
    assert len(clusters) == 1
    assert clusters[0].members == tuple(sps)


def test_far_pair_beyond_cap_stays_apart():
    sps = [stay(0, 0, 100.0, 0), stay(300, 0, 150.0, 5000)]
    assert len(dbscan_poi(sps, CFG)) == 2


def test_reach_uses_sum_below_cap():
    # 100 m apart: reach 40 + 50 = 90 is too short, 60 + 50 = 110 is enough
    assert len(dbscan_poi([stay(0, 0, 40.0, 0), stay(100, 0, 50.0, 5000)], CFG)) == 2
    assert len(dbscan_poi([stay(0, 0, 60.0, 0), stay(100, 0, 50.0, 5000)], CFG)) == 1


def test_chain_links_transitively():
    sps = [stay(0, 0, 80.0, 0), stay(150, 0, 80.0, 5000), stay(300, 0, 80.0, 10000)]
    assert len(reachability_graph(sps, CFG).edges) == 2  # A and C are 300 m apart
    assert len(dbscan_poi(sps, CFG)) == 1


def test_cluster_ids_follow_first_arrival():
    sps = [stay(2000, 0, 20.0, 100), stay(0, 0, 20.0, 50), stay(2010, 0, 20.0, 10)]
    clusters = dbscan_poi(sps, CFG)
    assert [c.cluster_id for c in clusters] == [1, 2]
    assert clusters[0].first_arrive == 10
    assert {m.t_arrive for m in clusters[0].members} == {10, 100}


def test_empty_and_singleton():
    assert dbscan_poi([], CFG) == []
    one = dbscan_poi([stay()], CFG)
    assert len(one) == 1 and one[0].cluster_id == 1


def test_min_pts_above_one_isolates_sparse_points():
    sps = [stay(0, 0, 50.0, 0), stay(60, 0, 50.0, 5000), stay(5000, 0, 50.0, 10000)]
    assert len(dbscan_poi(sps, CFG.replace(min_pts=2))) == 2
    # nobody has 3 points in its neighbourhood: all singletons
    assert len(set(dbscan_labels(sps, CFG.replace(min_pts=3)))) == 3


def random_stays(rng, n):
    out = []
    for i in range(n):
        centre = rng.integers(0, 4) * 600.0
        out.append(stay(centre + rng.normal(0, 60), rng.normal(0, 60),
                        float(rng.choice([10, 30, 60, 90, 150])), t0=10000 * i + int(rng.integers(0, 5000))))
    return out


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 60))
def test_dbscan_matches_union_find(seed, n):
    sps = random_stays(np.random.default_rng(seed), n)
    clusters = dbscan_poi(sps, CFG)
    assert partition_of(clusters, sps) == union_find_partition(n, reach_edges(sps, CFG.theta_l_eps_cap))
    assert sum(len(c.members) for c in clusters) == n
    assert [c.cluster_id for c in clusters] == list(range(1, len(clusters) + 1))
    firsts = [c.first_arrive for c in clusters]
    assert firsts == sorted(firsts)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 30))
def test_dbscan_permutation_invariant(seed, n):
    rng = np.random.default_rng(seed)
    sps = random_stays(rng, n)
    shuffled = [sps[i] for i in rng.permutation(n)]
    a = dbscan_poi(sps, CFG)
    b = dbscan_poi(shuffled, CFG)
    assert [(c.cluster_id, c.members) for c in a] == [(c.cluster_id, c.members) for c in b]


# -- k-means ------------------------------------------------------------------

def groups(centres, per=5, spread=20.0, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    for g, (n0, e0) in enumerate(centres):
        for k in range(per):
            out.append(stay(n0 + rng.normal(0, spread), e0 + rng.normal(0, spread), 20.0,
                            t0=100000 * g + 5000 * k))
    return out


def test_kmeans_two_groups():
    sps = groups([(0, 0), (3000, 0)])
    clusters = kmeans_poi(sps)
    assert len(clusters) == 2
    assert partition_of(clusters, sps) == {frozenset(range(5)), frozenset(range(5, 10))}


def test_kmeans_three_separated_groups():
    sps = groups([(0, 0), (10000, 0), (0, 10000)], per=6)
    clusters = kmeans_poi(sps, k_max=6)
    assert len(clusters) == 3
    assert partition_of(clusters, sps) == {frozenset(range(g * 6, g * 6 + 6)) for g in range(3)}


def test_kmeans_identical_points_single_cluster():
    sps = [stay(0, 0, 20.0, t0=5000 * k) for k in range(4)]
    assert len(kmeans_poi(sps)) == 1
    with pytest.raises(ValueError):
        kmeans_poi(sps[:1])


def test_kmeans_deterministic_for_seed():
    sps = groups([(0, 0), (800, 0), (0, 900), (700, 700)], per=4, spread=150.0, seed=4)
    assert kmeans_poi(sps, seed=3) == kmeans_poi(sps, seed=3)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 5))
def test_davies_bouldin_matches_loops(seed, k):
    rng = np.random.default_rng(seed)
    n = 4 * k
    lat = 1.35 + rng.normal(0, 0.01, n)
    lon = 103.8 + rng.normal(0, 0.01, n)
    labels = np.r_[np.arange(k), rng.integers(0, k, n - k)]
    got = davies_bouldin(lat, lon, labels)
    want = davies_bouldin_loops(list(zip(lat, lon)), labels.tolist())
    assert got == pytest.approx(want, rel=1e-9)


def test_davies_bouldin_single_cluster_is_inf():
    assert davies_bouldin([1.0, 1.1], [2.0, 2.1], [0, 0]) == math.inf


# -- hierarchical -------------------------------------------------------------

def test_hierarchical_cut_extremes():
    sps = groups([(0, 0), (2000, 0)], per=3, spread=50.0)
    assert len(hierarchical_poi(sps, 0.0)) == len(sps)
    assert len(hierarchical_poi(sps, math.inf)) == 1
    assert len(hierarchical_poi(sps, 500.0)) == 2
    assert hierarchical_poi([], 10.0) == []


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 40), st.sampled_from([50.0, 200.0, 500.0, 1500.0]))
def test_hierarchical_matches_distance_graph(seed, n, cut):
    sps = random_stays(np.random.default_rng(seed), n)
    pts = [(s.centroid_lat, s.centroid_lon) for s in sps]
    assert partition_of(hierarchical_poi(sps, cut), sps) == distance_graph_partition(pts, cut)
