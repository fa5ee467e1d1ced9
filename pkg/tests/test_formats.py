import json

import pytest

from conftest import stay
from lowpoi.formats import (ConfigError, InputError, clusters_from_assignments, format_config,
                            load_config, parse_config_text, poi_feature_collection, read_env_reports,
                            read_samples, read_stay_points, read_trajectories, write_env_reports,
                            write_locations, write_sensors, write_stay_points, write_trajectories)
from lowpoi.model import (Activity, EnvReport, IOLabel, LocationSample, PipelineConfig, PoiCluster,
                          PPLabel, SensorSample, Trajectory, Visit)


@pytest.mark.parametrize("delim", [",", "\t", ";", "|"])
def test_read_samples_sniffs_delimiter(tmp_path, delim):
    rows = [["user_id", "t", "lat", "lon", "accuracy"], ["u1", "0", "1.3", "103.8", "10"],
            ["u1", "300", "1.3", "103.8", "12"]]
    p = tmp_path / "loc.txt"
    p.write_text("\n".join(delim.join(r) for r in rows) + "\n")
    samples, rejects = read_samples(p)
    assert rejects == []
    assert samples == [LocationSample("u1", 0, 1.3, 103.8, 10.0), LocationSample("u1", 300, 1.3, 103.8, 12.0)]


def test_read_samples_reports_bad_rows(tmp_path):
    p = tmp_path / "loc.csv"
    p.write_text("user_id,t,lat,lon,accuracy\nu1,0,1,2,10\nu1,300,91,2,10\nu1,600,1,2,0\n")
    samples, rejects = read_samples(p)
    assert len(samples) == 1
    assert rejects == [(3, "latitude out of range"), (4, "accuracy must be positive")]


def test_read_samples_errors(tmp_path):
    with pytest.raises(InputError, match="missing input file"):
        read_samples(tmp_path / "nope.csv")
    p = tmp_path / "bad.csv"
    p.write_text("user_id,t,lat\nu,0,1\n")
    with pytest.raises(InputError, match="missing columns"):
        read_samples(p)
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    assert read_samples(empty) == ([], [])


def test_sample_files_round_trip(tmp_path):
    loc = [LocationSample("u1", 0, 1.3521, 103.8198, 10.5), LocationSample("u2", 60, -33.0, 151.2, 3.0)]
    sen = [SensorSample("u1", 0, 0.4, 10.5, 12.5, 3.0, 1, 250.0, Activity.STILL),
           SensorSample("u1", 60)]
    write_locations(tmp_path / "l.csv", loc)
    write_sensors(tmp_path / "s.csv", sen)
    assert read_samples(tmp_path / "l.csv")[0] == loc
    back, rejects = read_samples(tmp_path / "s.csv", "sensor")
    assert rejects == []
    assert back == sen


def test_stay_points_and_clusters_round_trip(tmp_path):
    sps = [stay(0, 0, 20.0, t0=0), stay(20, 0, 25.0, t0=5000), stay(4000, 0, 20.0, t0=9000, user="u2")]
    write_stay_points(tmp_path / "sp.csv", sps, [1, 1, 1])
    back, cids = read_stay_points(tmp_path / "sp.csv")
    assert back == sps and cids == [1, 1, 1]
    per_user = clusters_from_assignments(back, cids)
    assert [(c.user_id, len(c.members)) for c in per_user] == [("u1", 2), ("u2", 1)]
    pooled = clusters_from_assignments(back, cids, pooled=True)
    assert len(pooled) == 1 and pooled[0].user_id is None
    write_stay_points(tmp_path / "raw.csv", sps)
    with pytest.raises(InputError, match="no cluster assignment"):
        clusters_from_assignments(*read_stay_points(tmp_path / "raw.csv"))


def test_trajectories_and_reports_round_trip(tmp_path):
    trs = [Trajectory("u1", (Visit(1, 0, 100), Visit(2, 200, 500))), Trajectory("u2", (Visit(1, 5, 9),))]
    write_trajectories(tmp_path / "t.csv", trs)
    assert read_trajectories(tmp_path / "t.csv") == trs
    reports = [EnvReport(1, 4, {1: 50.0, 2: 25.0, 4: 10.0}, 25.0, IOLabel.INDOOR, PPLabel.PUBLIC,
                         False, False, "u1")]
    write_env_reports(tmp_path / "r.json", reports)
    assert read_env_reports(tmp_path / "r.json") == reports


def test_feature_collection_properties():
    c = PoiCluster(1, (stay(0, 0, 20.0, t0=10, dur=2000),), "u1")
    r = EnvReport(1, 6, {2: 60.0, 4: 73.12}, 0.0, IOLabel.OUTDOOR, PPLabel.PUBLIC, user_id="u1")
    fc = poi_feature_collection([c], [r])
    json.dumps(fc)
    (f,) = fc["features"]
    assert f["geometry"]["coordinates"] == [c.centroid_lon, c.centroid_lat]
    props = f["properties"]
    assert props["io_label"] == "Outdoor" and props["P4"] == 73.12 and props["P1"] is None
    assert (props["member_count"], props["first_arrive"], props["last_depart"]) == (1, 10, 2010)


def test_config_parsing(tmp_path):
    assert parse_config_text("# thresholds\ntheta_t_min_stay = 600  # ten minutes\nth_g: 25\n") == {
        "theta_t_min_stay": 600.0, "th_g": 25.0}
    with pytest.raises(ConfigError):
        parse_config_text("th_g 25")
    with pytest.raises(ConfigError):
        parse_config_text("th_g = loud")
    p = tmp_path / "cfg.txt"
    p.write_text(format_config(PipelineConfig(th_g=25)))
    assert load_config(p) == PipelineConfig(th_g=25)
    assert load_config(p, th_g=40, th_n=None).th_g == 40
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.txt")
    p.write_text("bogus = 3\n")
    with pytest.raises(ConfigError):
        load_config(p)
    with pytest.raises(ConfigError):
        load_config(None, th_g=-1)
