"""Scoring a pipeline run against synthetic ground truth."""

from __future__ import annotations

from pathlib import Path
from typing import Optional

from .formats import load_json, read_trajectories
from .geo import haversine_distance


def match_radius(theta_l: float = 200.0) -> float:
    return max(2.0 * theta_l, 400.0)


def match_pois(detected: list[dict], truth: list[dict], radius: float) -> list[tuple[int, int, float]]:
    """Greedy one-to-one matching by ascending distance; returns ``(det, truth, d)``."""
    pairs = []
    for i, det in enumerate(detected):
        for k, gt in enumerate(truth):
            d = haversine_distance((det["lat"], det["lon"]), (gt["lat"], gt["lon"]))
            if d <= radius:
                pairs.append((d, i, k))
    pairs.sort()
    used_d, used_t, out = set(), set(), []
    for d, i, k in pairs:
        if i in used_d or k in used_t:
            continue
        used_d.add(i)
        used_t.add(k)
        out.append((i, k, d))
    return sorted(out)


def _overlap(a0, a1, b0, b1) -> int:
    return max(0, min(a1, b1) - max(a0, b0))


def score_run(run_dir, ground_truth, theta_l: float = 200.0) -> dict:
    """POI precision/recall, label accuracy and visit-time overlap.

    ``run_dir`` holds the pipeline artifacts; ``ground_truth`` is the JSON
    file written by the synthetic generator (or the already-loaded dict).
    """
    run_dir = Path(run_dir)
    truth = ground_truth if isinstance(ground_truth, dict) else load_json(ground_truth)
    user = truth.get("user_id")
    fc = load_json(run_dir / "poi_clusters.geojson")
    detected = []
    for f in fc["features"]:
        props = f["properties"]
        if user is not None and props.get("user_id") not in (None, user):
            continue
        lon, lat = f["geometry"]["coordinates"]
        detected.append({"lat": lat, "lon": lon, **props})
    gt = truth["pois"]
    radius = match_radius(theta_l)
    matches = match_pois(detected, gt, radius)

    n_det, n_gt, tp = len(detected), len(gt), len(matches)
    if n_det:
        precision = tp / n_det
    else:
        precision = 1.0 if n_gt == 0 else 0.0
    recall = tp / n_gt if n_gt else 1.0

    io_hits = [detected[i]["io_label"] == gt[k]["io_label"] for i, k, _ in matches]
    pp_hits = [detected[i]["pp_label"] == gt[k]["pp_label"] for i, k, _ in matches]

    overlap: Optional[float] = None
    traj_path = run_dir / "trajectory.csv"
    if traj_path.exists() and truth.get("visits"):
        cid_to_poi = {detected[i]["cluster_id"]: gt[k]["poi_id"] for i, k, _ in matches}
        visits = [v for tr in read_trajectories(traj_path) if user is None or tr.user_id == user
                  for v in tr.visits]
        total = sum(v["t_depart"] - v["t_arrive"] for v in truth["visits"])
        covered = 0
        for g in truth["visits"]:
            for v in visits:
                if cid_to_poi.get(v.cluster_id) == g["poi_id"]:
                    covered += _overlap(v.t_arrive, v.t_depart, g["t_arrive"], g["t_depart"])
        overlap = covered / total if total else None

    return {
        "n_detected": n_det,
        "n_truth": n_gt,
        "true_positives": tp,
        "precision": precision,
        "recall": recall,
        "io_accuracy": sum(io_hits) / len(io_hits) if io_hits else None,
        "pp_accuracy": sum(pp_hits) / len(pp_hits) if pp_hits else None,
        "visit_overlap": overlap,
        "match_radius": radius,
        "matched_distances": [d for _, _, d in matches],
    }
