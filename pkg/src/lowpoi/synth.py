"""Seeded synthetic traces with known ground truth.

A scenario is an itinerary of stays at known POIs, joined by straight travel
legs, sampled every ``interval`` seconds. Artifacts found in real low-rate
phone logs can be injected: a GPS freeze (one coordinate replayed across a
long gap, as when a tunnel swallows the signal), accuracy spikes and
duplicated rows. All randomness flows from ``seed``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .formats import dump_json, write_locations, write_sensors
from .geo import EARTH_RADIUS, haversine_distance, offset
from .model import Activity, LocationSample, SensorSample

DEFAULT_ACCURACY = {"Indoor": 45.0, "Outdoor": 12.0}
TRAVEL_ACCURACY = 20.0


@dataclass
class PoiSpec:
    poi_id: str
    lat: float
    lon: float
    io_label: str = "Indoor"
    pp_label: str = "Private"
    accuracy: Optional[float] = None
    missing_noise: bool = False

    @property
    def base_accuracy(self) -> float:
        return self.accuracy if self.accuracy is not None else DEFAULT_ACCURACY[self.io_label]


@dataclass
class Leg:
    """One itinerary entry: ``kind`` is ``"stay"`` (at ``poi_id``) or ``"freeze"`` (at lat/lon)."""

    kind: str
    duration: int
    poi_id: Optional[str] = None
    lat: Optional[float] = None
    lon: Optional[float] = None


@dataclass
class SynthScenario:
    pois: list[PoiSpec]
    itinerary: list[Leg]
    seed: int = 0
    interval: int = 300
    start_time: int = 1_600_000_200
    speed: float = 8.0
    user_id: str = "u1"
    accuracy_floor: float = 0.0
    jitter_scale: float = 0.25
    accuracy_spikes: int = 0
    spike_accuracy: float = 150.0
    duplicate_rows: int = 0

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "SynthScenario":
        d = dict(d)
        pois = [PoiSpec(**p) for p in d.pop("pois")]
        legs = [Leg(**leg) for leg in d.pop("itinerary")]
        return cls(pois, legs, **d)


@dataclass
class SynthOutput:
    locations: list[LocationSample]
    sensors: list[SensorSample]
    truth: dict = field(default_factory=dict)

    def write(self, out_dir) -> dict:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = {
            "locations": out / "locations.csv",
            "sensors": out / "sensors.csv",
            "truth": out / "ground_truth.json",
        }
        write_locations(paths["locations"], self.locations)
        write_sensors(paths["sensors"], self.sensors)
        dump_json(paths["truth"], self.truth)
        return paths


def _stay_sensor(rng, poi: PoiSpec, user: str, t: int, acc: float) -> SensorSample:
    private = poi.pp_label == "Private"
    indoor = poi.io_label == "Indoor"
    if poi.missing_noise:
        noise = None
    else:
        noise = float(rng.uniform(5, 25) if private else rng.uniform(60, 95))
    if private:
        act = Activity.STILL
    else:
        act = Activity.WALKING if rng.random() < 0.6 else Activity.STILL
    return SensorSample(
        user, t,
        velocity=round(abs(float(rng.normal(0, 0.2))), 3),
        accuracy=acc,
        noise_raw=None if noise is None else round(noise, 2),
        battery_charging=int(indoor and private and rng.random() < 0.5),
        light=round(float(rng.uniform(100, 600) if indoor else rng.uniform(2000, 20000)), 1),
        activity=act,
    )


def _travel_sensor(rng, user: str, t: int, acc: float, speed: float) -> SensorSample:
    return SensorSample(
        user, t,
        velocity=round(speed * float(rng.uniform(0.8, 1.2)), 3),
        accuracy=acc,
        noise_raw=round(float(rng.uniform(30, 70)), 2),
        battery_charging=0,
        light=round(float(rng.uniform(1000, 10000)), 1),
        activity=Activity.OTHER,
    )


def generate_synthetic(scenario: SynthScenario) -> SynthOutput:
    """Sample a scenario into location rows, sensor rows and a ground-truth record.

    Stay and travel durations are rounded up to whole sampling intervals so
    that every dwell spans exactly its declared duration.
    """
    sc = scenario
    rng = np.random.default_rng(sc.seed)
    step = int(sc.interval)
    pois = {p.poi_id: p for p in sc.pois}
    user = sc.user_id
    loc: list[LocationSample] = []
    sen: list[SensorSample] = []
    stay_rows: list[int] = []
    visits, artifacts, visited = [], [], []

    def accuracy(base: float) -> float:
        return round(max(base, sc.accuracy_floor) * float(rng.uniform(1.0, 1.3)), 2)

    def jittered(lat, lon, acc):
        sd = sc.jitter_scale * acc
        p = offset(lat, lon, float(rng.normal(0, sd)), float(rng.normal(0, sd)))
        return round(p.lat, 7), round(p.lon, 7)

    t = int(sc.start_time)
    here = None
    for leg in sc.itinerary:
        if leg.kind == "stay":
            poi = pois[leg.poi_id]
            dest = (poi.lat, poi.lon)
        elif leg.kind == "freeze":
            dest = (leg.lat, leg.lon)
        else:
            raise ValueError(f"unknown leg kind {leg.kind!r}")

        if here is not None:
            dist = haversine_distance(here, dest, EARTH_RADIUS)
            n_steps = max(2, math.ceil(dist / sc.speed / step))
            for k in range(1, n_steps):
                f = k / n_steps
                lat = here[0] + f * (dest[0] - here[0])
                lon = here[1] + f * (dest[1] - here[1])
                acc = accuracy(TRAVEL_ACCURACY)
                tk = t + k * step
                loc.append(LocationSample(user, tk, *jittered(lat, lon, acc), acc))
                sen.append(_travel_sensor(rng, user, tk, acc, sc.speed))
            t += n_steps * step

        n = max(1, math.ceil(leg.duration / step))
        if leg.kind == "stay":
            for k in range(n + 1):
                acc = accuracy(poi.base_accuracy)
                tk = t + k * step
                stay_rows.append(len(loc))
                loc.append(LocationSample(user, tk, *jittered(poi.lat, poi.lon, acc), acc))
                sen.append(_stay_sensor(rng, poi, user, tk, acc))
            visits.append({"poi_id": poi.poi_id, "t_arrive": t, "t_depart": t + n * step})
            if poi.poi_id not in visited:
                visited.append(poi.poi_id)
        else:
            acc = accuracy(TRAVEL_ACCURACY)
            lat, lon = round(dest[0], 7), round(dest[1], 7)
            times = [t, t + (n - 1) * step, t + n * step] if n > 1 else [t, t + n * step]
            for tk in times:
                loc.append(LocationSample(user, tk, lat, lon, acc))
                sen.append(_travel_sensor(rng, user, tk, acc, 0.0))
            artifacts.append({"kind": "gps_freeze", "lat": lat, "lon": lon,
                              "t_start": t, "t_end": t + n * step})
        t += n * step
        here = dest

    if sc.accuracy_spikes and stay_rows:
        picks = rng.choice(stay_rows, size=min(sc.accuracy_spikes, len(stay_rows)), replace=False)
        for idx in sorted(picks.tolist()):
            s = loc[idx]
            acc = float(sc.spike_accuracy)
            loc[idx] = LocationSample(user, s.t, *jittered(s.lat, s.lon, acc), acc)
            artifacts.append({"kind": "accuracy_spike", "t": s.t})

    if sc.duplicate_rows:
        picks = set(rng.choice(len(loc), size=min(sc.duplicate_rows, len(loc)), replace=False).tolist())
        loc = [r for i, s in enumerate(loc) for r in ([s, s] if i in picks else [s])]
        sen = [r for i, s in enumerate(sen) for r in ([s, s] if i in picks else [s])]
        artifacts.append({"kind": "duplicate_rows", "count": len(picks)})

    truth = {
        "user_id": user,
        "pois": [
            {"poi_id": p.poi_id, "lat": p.lat, "lon": p.lon,
             "io_label": p.io_label, "pp_label": p.pp_label}
            for p in (pois[v] for v in visited)
        ],
        "visits": visits,
        "artifacts": artifacts,
    }
    return SynthOutput(loc, sen, truth)


# -- ready-made scenarios ---------------------------------------------------

HOME = (1.3521, 103.8198)


def _around(north_m: float, east_m: float):
    p = offset(HOME[0], HOME[1], north_m, east_m)
    return round(p.lat, 7), round(p.lon, 7)


def two_poi_scenario(seed: int = 7, accuracy_floor: float = 0.0) -> SynthScenario:
    """Home (indoor/private) and a park (outdoor/public), two visits each."""
    park = _around(3000, 2000)
    return SynthScenario(
        pois=[
            PoiSpec("home", *HOME, io_label="Indoor", pp_label="Private"),
            PoiSpec("park", *park, io_label="Outdoor", pp_label="Public"),
        ],
        itinerary=[
            Leg("stay", 3600, "home"), Leg("stay", 2700, "park"),
            Leg("stay", 5400, "home"), Leg("stay", 2400, "park"),
        ],
        seed=seed, accuracy_floor=accuracy_floor,
    )


def tunnel_scenario(seed: int = 11, freeze: int = 3600) -> SynthScenario:
    """Two real POIs with a GPS freeze in between, far from either."""
    office = _around(-2500, 4000)
    tunnel = _around(-1200, 9000)
    return SynthScenario(
        pois=[
            PoiSpec("home", *HOME, io_label="Indoor", pp_label="Private"),
            PoiSpec("office", *office, io_label="Indoor", pp_label="Public"),
        ],
        itinerary=[
            Leg("stay", 3600, "home"),
            Leg("freeze", freeze, lat=tunnel[0], lon=tunnel[1]),
            Leg("stay", 4800, "office"),
        ],
        seed=seed,
    )


def sensitivity_scenario(seed: int = 5, short: int = 900, long: int = 2700) -> SynthScenario:
    """A short and a long dwell at distinct places."""
    cafe = _around(2000, -2500)
    shop = _around(-3000, -1000)
    return SynthScenario(
        pois=[
            PoiSpec("cafe", *cafe, io_label="Indoor", pp_label="Public"),
            PoiSpec("shop", *shop, io_label="Indoor", pp_label="Public"),
        ],
        itinerary=[Leg("stay", short, "cafe"), Leg("stay", long, "shop")],
        seed=seed,
    )


def drift_scenario(accuracy_floor: float, seed: int = 3) -> SynthScenario:
    """Three outdoor POIs; only the device accuracy floor varies between runs."""
    a, b, c = HOME, _around(2500, 0), _around(0, 3500)
    return SynthScenario(
        pois=[
            PoiSpec("a", *a, io_label="Outdoor", pp_label="Public", accuracy=5.0),
            PoiSpec("b", *b, io_label="Outdoor", pp_label="Public", accuracy=5.0),
            PoiSpec("c", *c, io_label="Outdoor", pp_label="Public", accuracy=5.0),
        ],
        itinerary=[Leg("stay", 3000, "a"), Leg("stay", 3600, "b"),
                   Leg("stay", 2400, "c"), Leg("stay", 3000, "a")],
        seed=seed, accuracy_floor=accuracy_floor,
    )


PRESETS = {
    "two_poi": two_poi_scenario,
    "tunnel": tunnel_scenario,
    "sensitivity": sensitivity_scenario,
    "drift10": lambda seed=3: drift_scenario(10.0, seed),
    "drift50": lambda seed=3: drift_scenario(50.0, seed),
}
