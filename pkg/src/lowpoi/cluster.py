"""Grouping stay points into places.

``dbscan_poi`` is the method used by the pipeline. The reach between two
stay points is the sum of their mean GPS accuracies, capped at
``theta_l_eps_cap``; with ``min_pts = 1`` every point is a core point and the
clusters are exactly the connected components of the reach graph.

``kmeans_poi`` and ``hierarchical_poi`` are comparison baselines.
"""

from __future__ import annotations

import math
import warnings
from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.cluster.vq import kmeans2
from scipy.spatial.distance import squareform

from .geo import EARTH_RADIUS, haversine_matrix
from .model import PipelineConfig, PoiCluster, StayPoint


@dataclass(frozen=True)
class ReachabilityGraph:
    n: int
    edges: frozenset  # of (i, j) with i < j

    def neighbors(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for i, j in sorted(self.edges):
            adj[i].append(j)
            adj[j].append(i)
        return adj


def _centroids(stay_points: Sequence[StayPoint]):
    lat = np.array([s.centroid_lat for s in stay_points], dtype=float)
    lon = np.array([s.centroid_lon for s in stay_points], dtype=float)
    return lat, lon


def reach_matrix(stay_points: Sequence[StayPoint], theta_l: float = 200.0) -> np.ndarray:
    acc = np.array([s.mean_accuracy for s in stay_points], dtype=float)
    return np.minimum(acc[:, None] + acc[None, :], theta_l)


def reachability_graph(stay_points: Sequence[StayPoint],
                       cfg: PipelineConfig = PipelineConfig()) -> ReachabilityGraph:
    n = len(stay_points)
    if n == 0:
        return ReachabilityGraph(0, frozenset())
    d = haversine_matrix(*_centroids(stay_points), r=cfg.earth_radius)
    ok = d <= reach_matrix(stay_points, cfg.theta_l_eps_cap)
    iu, ju = np.nonzero(np.triu(ok, k=1))
    return ReachabilityGraph(n, frozenset(zip(iu.tolist(), ju.tolist())))


def _labels_to_clusters(stay_points: Sequence[StayPoint], labels: Sequence[int],
                        user_id: Optional[str] = None) -> list[PoiCluster]:
    """Build clusters numbered 1..K by the earliest arrival among their members."""
    groups: dict[int, list[int]] = {}
    for idx, lab in enumerate(labels):
        groups.setdefault(int(lab), []).append(idx)
    ordered = sorted(groups.values(),
                     key=lambda g: min((stay_points[i].t_arrive, i) for i in g))
    if user_id is None:
        users = {s.user_id for s in stay_points}
        user_id = users.pop() if len(users) == 1 else None
    out = []
    for cid, g in enumerate(ordered, start=1):
        members = sorted((stay_points[i] for i in g), key=lambda s: (s.t_arrive, s.user_id))
        out.append(PoiCluster(cid, tuple(members), user_id))
    return out


def dbscan_labels(stay_points: Sequence[StayPoint], cfg: PipelineConfig = PipelineConfig()) -> list[int]:
    """DBSCAN labels under the adaptive reach. Noise points get their own label."""
    graph = reachability_graph(stay_points, cfg)
    adj = graph.neighbors()
    min_pts = int(cfg.min_pts)
    core = [len(a) + 1 >= min_pts for a in adj]  # neighbourhood includes the point itself
    labels = [-1] * graph.n
    next_label = 0
    for seed in range(graph.n):
        if labels[seed] != -1 or not core[seed]:
            continue
        labels[seed] = next_label
        queue = deque([seed])
        while queue:
            p = queue.popleft()
            if not core[p]:
                continue
            for q in adj[p]:
                if labels[q] == -1:
                    labels[q] = next_label
                    queue.append(q)
        next_label += 1
    for i in range(graph.n):
        if labels[i] == -1:
            labels[i] = next_label
            next_label += 1
    return labels


def dbscan_poi(stay_points: Sequence[StayPoint], cfg: PipelineConfig = PipelineConfig()) -> list[PoiCluster]:
    """Cluster stay points into POIs. Every stay point lands in exactly one cluster."""
    if not stay_points:
        return []
    return _labels_to_clusters(stay_points, dbscan_labels(stay_points, cfg))


# -- k-means baseline -------------------------------------------------------

def davies_bouldin(lat, lon, labels, r: float = EARTH_RADIUS) -> float:
    """Davies-Bouldin index with haversine distances (lower is better).

    Scatter is the mean member-to-centroid distance, separation the
    centroid-to-centroid distance. Coincident centroids give ``inf``.
    """
    lat = np.asarray(lat, dtype=float)
    lon = np.asarray(lon, dtype=float)
    labels = np.asarray(labels)
    ids = np.unique(labels)
    k = len(ids)
    if k < 2:
        return math.inf
    c_lat = np.array([lat[labels == c].mean() for c in ids])
    c_lon = np.array([lon[labels == c].mean() for c in ids])
    sigma = np.empty(k)
    for m, c in enumerate(ids):
        mask = labels == c
        d = haversine_matrix(np.r_[c_lat[m], lat[mask]], np.r_[c_lon[m], lon[mask]], r)[0, 1:]
        sigma[m] = d.mean()
    sep = haversine_matrix(c_lat, c_lon, r)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = (sigma[:, None] + sigma[None, :]) / sep
    ratio[sep == 0] = math.inf
    np.fill_diagonal(ratio, -math.inf)
    return float(ratio.max(axis=1).mean())


def _farthest_point_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    idx = [int(rng.integers(len(x)))]
    d = np.linalg.norm(x - x[idx[0]], axis=1)
    for _ in range(1, k):
        nxt = int(np.argmax(d))
        idx.append(nxt)
        d = np.minimum(d, np.linalg.norm(x - x[nxt], axis=1))
    return x[idx].copy()


def kmeans_labels(lat, lon, k: int, seed: int = 0) -> np.ndarray:
    x = np.column_stack([np.asarray(lat, float), np.asarray(lon, float)])
    init = _farthest_point_init(x, k, np.random.default_rng(seed))
    with warnings.catch_warnings():
        # an emptied cluster just lowers the effective k
        warnings.simplefilter("ignore", UserWarning)
        _, labels = kmeans2(x, init, minit="matrix", iter=50, missing="warn")
    return labels


def kmeans_poi(stay_points: Sequence[StayPoint], k_max: int = 10, seed: int = 0,
               r: float = EARTH_RADIUS) -> list[PoiCluster]:
    """k-means on raw (lat, lon), with k in 2..k_max chosen by the Davies-Bouldin index."""
    n = len(stay_points)
    if n < 2:
        raise ValueError("k-means needs at least 2 stay points")
    lat, lon = _centroids(stay_points)
    if np.ptp(lat) == 0 and np.ptp(lon) == 0:
        return _labels_to_clusters(stay_points, [0] * n)
    k_hi = max(2, min(k_max, n - 1))
    best = None
    for k in range(2, k_hi + 1):
        labels = kmeans_labels(lat, lon, k, seed)
        score = davies_bouldin(lat, lon, labels, r)
        if best is None or score < best[0]:
            best = (score, labels)
    return _labels_to_clusters(stay_points, best[1])


# -- hierarchical baseline --------------------------------------------------

def hierarchical_poi(stay_points: Sequence[StayPoint], cut_distance: float,
                     r: float = EARTH_RADIUS) -> list[PoiCluster]:
    """Single-linkage clustering under haversine distance, cut at ``cut_distance`` meters."""
    n = len(stay_points)
    if n == 0:
        return []
    if n == 1:
        return _labels_to_clusters(stay_points, [0])
    d = haversine_matrix(*_centroids(stay_points), r=r)
    z = linkage(squareform(d, checks=False), method="single")
    t = float(cut_distance) if math.isfinite(cut_distance) else float(d.max()) + 1.0
    labels = fcluster(z, t=t, criterion="distance")
    return _labels_to_clusters(stay_points, labels)
