"""Command-line entry point: ``lowpoi <command> ...``.

Exit codes: 0 success, 1 unusable input, 2 invalid configuration.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .formats import (ConfigError, InputError, clusters_from_assignments, dump_json, load_config,
                      load_json, poi_feature_collection, read_samples, read_stay_points, write_env_reports,
                      write_locations, write_rows, write_sensors, write_stay_points,
                      write_trajectories)
from .pipeline import (METHODS, classify_all, cluster_all, cluster_assignments, detect_all,
                       preprocess, run_pipeline, trajectories_all)
from .scoring import score_run
from .synth import PRESETS, SynthScenario, generate_synthetic

log = logging.getLogger("lowpoi")

# flag -> PipelineConfig field
CONFIG_FLAGS = {
    "min_stay": "theta_t_min_stay",
    "theta_t_gap": "theta_t_gap",
    "theta_d": "theta_d_valid",
    "theta_l": "theta_l_eps_cap",
    "th_g": "th_g",
    "th_n": "th_n",
    "th_l": "th_l",
    "slot_len": "slot_len",
    "min_pts": "min_pts",
}


def _config_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("configuration (flags override --config)")
    g.add_argument("--config", help="key = value file mirroring PipelineConfig")
    g.add_argument("--min-stay", type=float, help="minimum stay duration, seconds")
    g.add_argument("--theta-t-gap", type=float, help="max gap between fixes in a stay, seconds")
    g.add_argument("--theta-d", type=float, help="max jump between fixes in a stay, meters")
    g.add_argument("--theta-l", type=float, help="cap on the accuracy-based reach, meters")
    g.add_argument("--th-g", type=float, help="GPS accuracy threshold, meters")
    g.add_argument("--th-n", type=float, help="normalized noise threshold")
    g.add_argument("--th-l", type=float, help="light threshold, lux")
    g.add_argument("--slot-len", type=int, help="slot length, seconds")
    g.add_argument("--min-pts", type=int, help="DBSCAN minPts (default 1)")
    return p


def _cluster_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--method", choices=METHODS, default="dbscan")
    p.add_argument("--cut-distance", type=float, help="hierarchical cut, meters (default theta-l)")
    p.add_argument("--k-max", type=int, default=10, help="largest k tried by k-means")
    p.add_argument("--pool-users", action="store_true", help="cluster all users together")


def _cfg(args):
    overrides = {field: getattr(args, flag) for flag, field in CONFIG_FLAGS.items()}
    return load_config(args.config, **overrides)


def _read(path, kind):
    samples, rejects = read_samples(path, kind)
    for row, why in rejects:
        log.warning("%s row %d rejected: %s", Path(path).name, row, why)
    return samples, rejects


def _read_locations(path):
    loc, _ = _read(path, "location")
    if not loc:
        raise InputError("no usable location data")
    return loc


def cmd_preprocess(args):
    cfg = _cfg(args)
    loc, loc_rej = _read(args.locations, "location")
    sen, sen_rej = _read(args.sensors, "sensor") if args.sensors else ([], [])
    if not loc and not sen:
        raise InputError("no usable rows")
    loc_u, sen_u = preprocess(loc, sen, cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_locations(out / "locations.csv", [s for u in loc_u for s in loc_u[u]])
    write_sensors(out / "sensors.csv", [s for u in sen_u for s in sen_u[u]])
    write_rows(out / "rejects.csv", ("file", "row", "reason"),
               [("locations", r, w) for r, w in loc_rej] + [("sensors", r, w) for r, w in sen_rej])


def cmd_staypoints(args):
    cfg = _cfg(args)
    loc_u, _ = preprocess(_read_locations(args.locations), [], cfg)
    sp_u = detect_all(loc_u, cfg, validate=not args.no_validation)
    write_stay_points(args.out, [s for u in sorted(sp_u) for s in sp_u[u]])


def _stay_points_by_user(path):
    sps, cids = read_stay_points(path)
    by_user: dict = {}
    for s in sps:
        by_user.setdefault(s.user_id, []).append(s)
    return sps, cids, dict(sorted(by_user.items()))


def cmd_cluster(args):
    cfg = _cfg(args)
    sps, _, sp_u = _stay_points_by_user(args.stay_points)
    clusters = cluster_all(sp_u, cfg, args.method, args.pool_users, args.cut_distance, args.k_max)
    ordered = [s for u in sp_u for s in sp_u[u]]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_stay_points(out / "stay_points.csv", ordered, cluster_assignments(ordered, clusters))
    dump_json(out / "poi_clusters.geojson", poi_feature_collection(clusters))


def cmd_trajectory(args):
    cfg = _cfg(args)
    sps, cids, sp_u = _stay_points_by_user(args.stay_points)
    clusters = clusters_from_assignments(sps, cids, pooled=args.pool_users)
    write_trajectories(args.out, trajectories_all(sp_u, clusters, cfg))


def cmd_classify(args):
    cfg = _cfg(args)
    sps, cids, sp_u = _stay_points_by_user(args.stay_points)
    clusters = clusters_from_assignments(sps, cids, pooled=args.pool_users)
    loc, _ = _read(args.locations, "location")
    sen, _ = _read(args.sensors, "sensor")
    loc_u, sen_u = preprocess(loc, sen, cfg)
    trajs = trajectories_all(sp_u, clusters, cfg)
    write_env_reports(args.out, classify_all(clusters, trajs, loc_u, sen_u, cfg))


def cmd_pipeline(args):
    cfg = _cfg(args)
    manifest = run_pipeline(args.locations, args.sensors, cfg, args.out,
                            validate=not args.no_validation, method=args.method,
                            pool_users=args.pool_users, cut_distance=args.cut_distance,
                            k_max=args.k_max)
    print(json.dumps(manifest.counts, sort_keys=True))


def cmd_synth(args):
    if args.scenario:
        scenario = SynthScenario.from_dict(load_json(args.scenario))
        if args.seed is not None:
            scenario.seed = args.seed
    else:
        factory = PRESETS[args.preset]
        scenario = factory() if args.seed is None else factory(seed=args.seed)
    paths = generate_synthetic(scenario).write(args.out)
    dump_json(Path(args.out) / "scenario.json", scenario.to_dict())
    for name, p in paths.items():
        print(f"{name}: {p}")


def cmd_score(args):
    cfg = _cfg(args)
    metrics = score_run(args.run, args.truth, cfg.theta_l_eps_cap)
    text = json.dumps(metrics, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    print(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lowpoi", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    cfgp = _config_parent()

    p = sub.add_parser("preprocess", parents=[cfgp], help="deduplicate and normalize noise")
    p.add_argument("--locations", required=True)
    p.add_argument("--sensors")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("staypoints", parents=[cfgp], help="detect stay points")
    p.add_argument("--locations", required=True)
    p.add_argument("--out", required=True, help="stay point CSV to write")
    p.add_argument("--no-validation", action="store_true", help="unvalidated baseline scan")
    p.set_defaults(func=cmd_staypoints)

    p = sub.add_parser("cluster", parents=[cfgp], help="group stay points into POIs")
    p.add_argument("--stay-points", required=True)
    p.add_argument("--out", required=True, help="output directory")
    _cluster_flags(p)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("trajectory", parents=[cfgp], help="time-ordered POI visits")
    p.add_argument("--stay-points", required=True, help="clustered stay point CSV")
    p.add_argument("--out", required=True)
    p.add_argument("--pool-users", action="store_true")
    p.set_defaults(func=cmd_trajectory)

    p = sub.add_parser("classify", parents=[cfgp], help="environment confidences per POI")
    p.add_argument("--stay-points", required=True, help="clustered stay point CSV")
    p.add_argument("--locations", required=True)
    p.add_argument("--sensors", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--pool-users", action="store_true")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("pipeline", parents=[cfgp], help="run every stage")
    p.add_argument("--locations", required=True)
    p.add_argument("--sensors")
    p.add_argument("--out", required=True)
    p.add_argument("--no-validation", action="store_true")
    _cluster_flags(p)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("synth", help="generate a synthetic scenario")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=sorted(PRESETS))
    src.add_argument("--scenario", help="scenario JSON file")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("score", parents=[cfgp], help="score a run against ground truth")
    p.add_argument("--run", required=True, help="pipeline output directory")
    p.add_argument("--truth", required=True, help="ground_truth.json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_score)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except ConfigError as exc:
        print(f"lowpoi: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except InputError as exc:
        print(f"lowpoi: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
