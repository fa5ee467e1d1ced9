"""Reading and writing the flat-file formats used by the pipeline and CLI.

Inputs are delimited text with a header row; empty fields are missing values.
Every writer is deterministic: same records in, same bytes out.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .model import (LOCATION_COLUMNS, SENSOR_COLUMNS, EnvReport, LocationSample,
                    PipelineConfig, PoiCluster, SensorSample, StayPoint, Trajectory,
                    ValidationError, Visit, validate_sample)


class InputError(Exception):
    """Unusable input: missing file, bad header, or no valid rows."""


class ConfigError(Exception):
    """Invalid configuration file or override."""


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _sniff_delimiter(header: str) -> str:
    for d in ("\t", ";", "|"):
        if d in header:
            return d
    return ","


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def read_samples(path, kind: str = "location"):
    """Parse a sample file. Returns ``(samples, rejects)``.

    ``rejects`` is a list of ``(row_number, reason)``; row numbers count the
    header as row 1.
    """
    path = Path(path)
    if not path.exists():
        raise InputError(f"missing input file: {path}")
    required = ("user_id", "t", "lat", "lon", "accuracy") if kind == "location" else ("user_id", "t")
    samples, rejects = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        header = fh.readline()
        if not header.strip():
            return samples, rejects
        fh.seek(0)
        reader = csv.DictReader(fh, delimiter=_sniff_delimiter(header))
        fieldnames = [f.strip() for f in reader.fieldnames or []]
        missing = [c for c in required if c not in fieldnames]
        if missing:
            raise InputError(f"{path.name}: missing columns {missing}")
        reader.fieldnames = fieldnames
        for rec in reader:
            row = reader.line_num
            try:
                samples.append(validate_sample(rec, kind, row))
            except ValidationError as exc:
                rejects.append((row, exc.reason))
    return samples, rejects


def write_rows(path, columns: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(v) for v in r])


def write_locations(path, samples: Iterable[LocationSample]) -> None:
    write_rows(path, LOCATION_COLUMNS,
               ((s.user_id, s.t, s.lat, s.lon, s.accuracy) for s in samples))


SENSOR_OUT_COLUMNS = SENSOR_COLUMNS + ("noise_norm",)


def write_sensors(path, samples: Iterable[SensorSample]) -> None:
    write_rows(path, SENSOR_OUT_COLUMNS, (
        (s.user_id, s.t, s.velocity, s.accuracy, s.noise_raw, s.battery_charging, s.light,
         None if s.activity is None else s.activity.label, s.noise_norm)
        for s in samples))


STAY_POINT_COLUMNS = ("user_id", "cluster_id", "t_arrive", "t_depart", "centroid_lat",
                      "centroid_lon", "mean_accuracy", "first_index", "last_index")


def write_stay_points(path, stay_points: Sequence[StayPoint],
                      cluster_ids: Optional[Sequence[Optional[int]]] = None) -> None:
    if cluster_ids is None:
        cluster_ids = [None] * len(stay_points)
    write_rows(path, STAY_POINT_COLUMNS, (
        (s.user_id, cid, s.t_arrive, s.t_depart, s.centroid_lat, s.centroid_lon,
         s.mean_accuracy, s.member_range[0], s.member_range[1])
        for s, cid in zip(stay_points, cluster_ids)))


def read_stay_points(path) -> tuple[list[StayPoint], list[Optional[int]]]:
    path = Path(path)
    if not path.exists():
        raise InputError(f"missing input file: {path}")
    out, cids = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        for rec in csv.DictReader(fh):
            out.append(StayPoint(
                rec["user_id"], float(rec["centroid_lat"]), float(rec["centroid_lon"]),
                int(rec["t_arrive"]), int(rec["t_depart"]), float(rec["mean_accuracy"]),
                (int(rec["first_index"]), int(rec["last_index"]))))
            cids.append(int(rec["cluster_id"]) if rec.get("cluster_id") else None)
    return out, cids


def clusters_from_assignments(stay_points: Sequence[StayPoint], cluster_ids: Sequence[Optional[int]],
                              pooled: bool = False) -> list[PoiCluster]:
    """Rebuild clusters from a stay-point table carrying ``cluster_id``."""
    groups: dict[tuple, list[StayPoint]] = {}
    for s, cid in zip(stay_points, cluster_ids):
        if cid is None:
            raise InputError("stay point table has no cluster assignment; run `cluster` first")
        key = (None, cid) if pooled else (s.user_id, cid)
        groups.setdefault(key, []).append(s)
    return [PoiCluster(cid, tuple(m), user) for (user, cid), m in sorted(groups.items(), key=lambda kv: (str(kv[0][0]), kv[0][1]))]


TRAJECTORY_COLUMNS = ("user_id", "cluster_id", "t_arrive", "t_depart")


def write_trajectories(path, trajectories: Iterable[Trajectory]) -> None:
    write_rows(path, TRAJECTORY_COLUMNS, (
        (tr.user_id, v.cluster_id, v.t_arrive, v.t_depart)
        for tr in trajectories for v in tr.visits))


def read_trajectories(path) -> list[Trajectory]:
    by_user: dict[str, list[Visit]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for rec in csv.DictReader(fh):
            by_user.setdefault(rec["user_id"], []).append(
                Visit(int(rec["cluster_id"]), int(rec["t_arrive"]), int(rec["t_depart"])))
    return [Trajectory(u, tuple(v)) for u, v in by_user.items()]


def dump_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def write_env_reports(path, reports: Sequence[EnvReport]) -> None:
    dump_json(path, [r.to_dict() for r in reports])


def read_env_reports(path) -> list[EnvReport]:
    return [EnvReport.from_dict(d) for d in load_json(path)]


def poi_feature_collection(clusters: Sequence[PoiCluster],
                           reports: Optional[Sequence[EnvReport]] = None) -> dict:
    """GeoJSON FeatureCollection with one Point feature per POI cluster."""
    by_key = {}
    for r in reports or ():
        by_key[(r.user_id, r.poi_cluster_id)] = r
    feats = []
    for c in clusters:
        r = by_key.get((c.user_id, c.cluster_id))
        props = {
            "user_id": c.user_id,
            "cluster_id": c.cluster_id,
            "member_count": len(c.members),
            "first_arrive": c.first_arrive,
            "last_depart": c.last_depart,
            "io_label": r.io_label.value if r else None,
            "pp_label": r.pp_label.value if r else None,
            "P0": r.p0 if r else None,
        }
        for code in (1, 2, 3, 4):
            props[f"P{code}"] = r.p.get(code) if r else None
        feats.append({
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": [c.centroid_lon, c.centroid_lat]},
            "properties": props,
        })
    return {"type": "FeatureCollection", "features": feats}


# -- config -----------------------------------------------------------------

def parse_config_text(text: str) -> dict:
    """``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        sep = "=" if "=" in line else (":" if ":" in line else None)
        if sep is None:
            raise ConfigError(f"config line {lineno}: expected key = value")
        key, value = (part.strip() for part in line.split(sep, 1))
        try:
            out[key] = float(value)
        except ValueError:
            raise ConfigError(f"config line {lineno}: {key} is not a number") from None
    return out


def load_config(path=None, **overrides) -> PipelineConfig:
    values = {}
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"missing config file: {path}")
        values = parse_config_text(path.read_text(encoding="utf-8"))
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return PipelineConfig.from_dict(values)
    except (ValidationError, TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def format_config(cfg: PipelineConfig) -> str:
    return "".join(f"{k} = {_fmt(v)}\n" for k, v in cfg.to_dict().items())
