"""End-to-end batch run: preprocess, stay points, POI clustering, trajectories,
time alignment and environment classification, in that order.

Each stage is a plain function over per-user dictionaries so the CLI can run
stages separately; :func:`run_pipeline` chains them and writes all artifacts.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .cluster import dbscan_poi, hierarchical_poi, kmeans_poi
from .formats import (InputError, dump_json, poi_feature_collection, read_samples, sha256_file,
                      write_env_reports, write_rows, write_stay_points, write_trajectories)
from .model import (EnvReport, LocationSample, PipelineConfig, PoiCluster, SensorSample,
                    StayPoint, Trajectory)
from .prep import denoise, normalize_series
from .sfec import estimate_labels, poi_confidence, poi_slots, slot_confidences
from .staypoint import detect_baseline, detect_vspd
from .trajectory import build_trajectory

logger = logging.getLogger(__name__)

METHODS = ("dbscan", "kmeans", "hierarchical")


@dataclass
class RunManifest:
    config: dict
    inputs: dict
    counts: dict
    options: dict = field(default_factory=dict)
    version: str = __version__

    def check(self) -> None:
        c = self.counts
        if c["deduplicated_locations"] > c["raw_locations"]:
            raise AssertionError("more deduplicated rows than raw rows")
        if c["stay_points"] > c["deduplicated_locations"]:
            raise AssertionError("more stay points than location samples")

    def to_dict(self) -> dict:
        return {"version": self.version, "config": self.config, "inputs": self.inputs,
                "counts": self.counts, "options": self.options}


def group_by_user(samples):
    out: dict[str, list] = {}
    for s in samples:
        out.setdefault(s.user_id, []).append(s)
    return dict(sorted(out.items()))


def preprocess(loc: Sequence[LocationSample], sen: Sequence[SensorSample],
               cfg: PipelineConfig = PipelineConfig()):
    """Per-user denoised locations and denoised, noise-normalized sensors."""
    loc_u = {u: denoise(v) for u, v in group_by_user(loc).items()}
    sen_u = {u: normalize_series(denoise(v), int(cfg.noise_window))
             for u, v in group_by_user(sen).items()}
    return loc_u, sen_u


def detect_all(loc_u: dict, cfg: PipelineConfig, validate: bool = True) -> dict[str, list[StayPoint]]:
    detect = detect_vspd if validate else detect_baseline
    return {u: detect(v, cfg) for u, v in loc_u.items()}


def _cluster(points: Sequence[StayPoint], cfg, method, cut_distance, k_max):
    if method == "dbscan":
        return dbscan_poi(points, cfg)
    if method == "kmeans":
        if len(points) < 3:
            # too few points for a k search; fall back to the density method
            return dbscan_poi(points, cfg)
        return kmeans_poi(points, k_max, r=cfg.earth_radius)
    if method == "hierarchical":
        return hierarchical_poi(points, cut_distance if cut_distance is not None else cfg.theta_l_eps_cap,
                                r=cfg.earth_radius)
    raise ValueError(f"unknown clustering method {method!r}")


def cluster_all(sp_u: dict[str, list[StayPoint]], cfg: PipelineConfig, method: str = "dbscan",
                pool_users: bool = False, cut_distance: Optional[float] = None,
                k_max: int = 10) -> list[PoiCluster]:
    """Clusters per user (ids restart at 1 per user), or over all users when pooled."""
    if pool_users:
        pts = [s for u in sorted(sp_u) for s in sp_u[u]]
        return _cluster(pts, cfg, method, cut_distance, k_max) if pts else []
    out = []
    for u in sorted(sp_u):
        if sp_u[u]:
            out.extend(_cluster(sp_u[u], cfg, method, cut_distance, k_max))
    return out


def clusters_for_user(clusters: Sequence[PoiCluster], user: str) -> list[PoiCluster]:
    return [c for c in clusters if c.user_id is None or c.user_id == user]


def trajectories_all(sp_u: dict, clusters: Sequence[PoiCluster], cfg: PipelineConfig) -> list[Trajectory]:
    return [build_trajectory(sp_u[u], clusters_for_user(clusters, u), int(cfg.slot_len), u)
            for u in sorted(sp_u)]


def classify_all(clusters: Sequence[PoiCluster], trajectories: Sequence[Trajectory],
                 loc_u: dict, sen_u: dict, cfg: PipelineConfig) -> list[EnvReport]:
    """One report per cluster, slotting every visit of that cluster."""
    reports = []
    for c in clusters:
        intervals_by_user: dict[str, list] = {}
        for tr in trajectories:
            if c.user_id is not None and tr.user_id != c.user_id:
                continue
            for v in tr.visits:
                if v.cluster_id == c.cluster_id:
                    intervals_by_user.setdefault(tr.user_id, []).append((v.t_arrive, v.t_depart))
        if not intervals_by_user:
            continue
        slots = []
        for u, iv in sorted(intervals_by_user.items()):
            slots.extend(poi_slots(iv, loc_u.get(u, []), sen_u.get(u, []), cfg))
        p, p0 = poi_confidence([slot_confidences(s, cfg) for s in slots])
        io, pp, warn_io, warn_pp = estimate_labels(p, cfg.label_margin_warn)
        reports.append(EnvReport(c.cluster_id, len(slots), p, p0, io, pp, warn_io, warn_pp, c.user_id))
    return reports


def cluster_assignments(stay_points: Sequence[StayPoint], clusters: Sequence[PoiCluster]) -> list[int]:
    index = {}
    for c in clusters:
        for m in c.members:
            index[m] = c.cluster_id
    return [index[s] for s in stay_points]


def run_pipeline(location_file, sensor_file=None, config: Optional[PipelineConfig] = None,
                 out_dir=".", validate: bool = True, method: str = "dbscan",
                 pool_users: bool = False, cut_distance: Optional[float] = None,
                 k_max: int = 10) -> RunManifest:
    """Run every stage and write the artifacts into ``out_dir``.

    Artifacts: ``stay_points.csv``, ``poi_clusters.geojson``,
    ``trajectory.csv``, ``env_reports.json``, ``rejects.csv`` and
    ``manifest.json``. Raises :class:`InputError` when no location row is usable.
    """
    cfg = config or PipelineConfig()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    loc_raw, loc_rej = read_samples(location_file, "location")
    if sensor_file is not None:
        sen_raw, sen_rej = read_samples(sensor_file, "sensor")
    else:
        sen_raw, sen_rej = [], []
    write_rows(out / "rejects.csv", ("file", "row", "reason"),
               [("locations", r, why) for r, why in loc_rej] + [("sensors", r, why) for r, why in sen_rej])
    if not loc_raw:
        raise InputError("no usable location data")

    loc_u, sen_u = preprocess(loc_raw, sen_raw, cfg)
    sp_u = detect_all(loc_u, cfg, validate)
    clusters = cluster_all(sp_u, cfg, method, pool_users, cut_distance, k_max)
    trajs = trajectories_all(sp_u, clusters, cfg)
    reports = classify_all(clusters, trajs, loc_u, sen_u, cfg)

    all_sp = [s for u in sorted(sp_u) for s in sp_u[u]]
    write_stay_points(out / "stay_points.csv", all_sp, cluster_assignments(all_sp, clusters))
    dump_json(out / "poi_clusters.geojson", poi_feature_collection(clusters, reports))
    write_trajectories(out / "trajectory.csv", trajs)
    write_env_reports(out / "env_reports.json", reports)

    inputs = {"locations": sha256_file(location_file)}
    if sensor_file is not None:
        inputs["sensors"] = sha256_file(sensor_file)
    counts = {
        "raw_locations": len(loc_raw) + len(loc_rej),
        "rejected_locations": len(loc_rej),
        "deduplicated_locations": sum(len(v) for v in loc_u.values()),
        "raw_sensors": len(sen_raw) + len(sen_rej),
        "rejected_sensors": len(sen_rej),
        "deduplicated_sensors": sum(len(v) for v in sen_u.values()),
        "users": len(loc_u),
        "stay_points": len(all_sp),
        "clusters": len(clusters),
        "pois_classified": len(reports),
    }
    manifest = RunManifest(
        config=cfg.to_dict(), inputs=inputs, counts=counts,
        options={"validation": validate, "method": method, "pool_users": pool_users,
                 "cut_distance": cut_distance, "k_max": k_max},
    )
    manifest.check()
    dump_json(out / "manifest.json", manifest.to_dict())
    logger.info("pipeline: %d stay points, %d clusters", len(all_sp), len(clusters))
    return manifest
