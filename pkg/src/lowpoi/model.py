"""Shared domain types.

All records are frozen dataclasses that validate themselves on construction,
so a value that exists is a value that satisfies its invariants. Every type
has ``to_dict``/``from_dict`` for lossless round trips through JSON.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Mapping, Optional


class ValidationError(ValueError):
    """A record failed validation. ``row`` is set when it came from a file."""

    def __init__(self, reason: str, row: Optional[int] = None):
        self.reason = reason
        self.row = row
        msg = reason if row is None else f"row {row}: {reason}"
        super().__init__(msg)


class Activity(enum.IntEnum):
    # order doubles as the tie-break order for "dominant activity"
    STILL = 0
    WALKING = 1
    OTHER = 2

    @property
    def label(self) -> str:
        return self.name.capitalize()

    @classmethod
    def parse(cls, text: str) -> "Activity":
        try:
            return cls[text.strip().upper()]
        except KeyError:
            raise ValidationError(f"unknown activity {text!r}") from None


class IOLabel(str, enum.Enum):
    INDOOR = "Indoor"
    OUTDOOR = "Outdoor"
    UNKNOWN = "Unknown"


class PPLabel(str, enum.Enum):
    PRIVATE = "Private"
    PUBLIC = "Public"
    UNKNOWN = "Unknown"


def _finite(name: str, value: float) -> None:
    if not isinstance(value, (int, float)) or isinstance(value, bool) or not math.isfinite(value):
        raise ValidationError(f"{name} must be a finite number, got {value!r}")


def _check_lat_lon(lat: float, lon: float) -> None:
    _finite("latitude", lat)
    _finite("longitude", lon)
    if not -90.0 <= lat <= 90.0:
        raise ValidationError("latitude out of range")
    if not -180.0 <= lon <= 180.0:
        raise ValidationError("longitude out of range")


def _check_time(name: str, t: Any) -> None:
    if not isinstance(t, int) or isinstance(t, bool):
        raise ValidationError(f"{name} must be integer seconds, got {t!r}")


@dataclass(frozen=True)
class LocationSample:
    """One GPS fix. ``accuracy`` is the 68%-confidence radius in meters."""

    user_id: str
    t: int
    lat: float
    lon: float
    accuracy: float

    def __post_init__(self):
        _check_time("t", self.t)
        _check_lat_lon(self.lat, self.lon)
        _finite("accuracy", self.accuracy)
        if self.accuracy <= 0:
            raise ValidationError("accuracy must be positive")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "LocationSample":
        return cls(str(d["user_id"]), int(d["t"]), float(d["lat"]), float(d["lon"]),
                   float(d["accuracy"]))


@dataclass(frozen=True)
class SensorSample:
    """One multi-sensor reading. Missing readings are ``None``, never zero."""

    user_id: str
    t: int
    velocity: Optional[float] = None
    accuracy: Optional[float] = None
    noise_raw: Optional[float] = None
    noise_norm: Optional[float] = None
    battery_charging: Optional[int] = None
    light: Optional[float] = None
    activity: Optional[Activity] = None

    def __post_init__(self):
        _check_time("t", self.t)
        for name in ("velocity", "accuracy", "noise_raw", "noise_norm", "light"):
            v = getattr(self, name)
            if v is None:
                continue
            _finite(name, v)
            if v < 0:
                raise ValidationError(f"{name} must be nonnegative")
        if self.accuracy is not None and self.accuracy == 0:
            raise ValidationError("accuracy must be positive")
        if self.noise_norm is not None and self.noise_norm > 10:
            raise ValidationError("noise_norm must lie in [0, 10]")
        if self.battery_charging not in (None, 0, 1):
            raise ValidationError("battery_charging must be 0 or 1")
        if self.activity is not None and not isinstance(self.activity, Activity):
            raise ValidationError(f"activity must be an Activity, got {self.activity!r}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["activity"] = None if self.activity is None else self.activity.label
        return d

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "SensorSample":
        def opt(name, conv=float):
            v = d.get(name)
            return None if v is None else conv(v)

        act = d.get("activity")
        return cls(
            str(d["user_id"]), int(d["t"]),
            velocity=opt("velocity"), accuracy=opt("accuracy"),
            noise_raw=opt("noise_raw"), noise_norm=opt("noise_norm"),
            battery_charging=opt("battery_charging", int), light=opt("light"),
            activity=None if act is None else Activity.parse(act),
        )


@dataclass(frozen=True)
class StayPoint:
    """A dwell segment ``member_range = (i, j)`` (inclusive) of a location series."""

    user_id: str
    centroid_lat: float
    centroid_lon: float
    t_arrive: int
    t_depart: int
    mean_accuracy: float
    member_range: tuple[int, int]

    def __post_init__(self):
        _check_lat_lon(self.centroid_lat, self.centroid_lon)
        _check_time("t_arrive", self.t_arrive)
        _check_time("t_depart", self.t_depart)
        if self.t_depart < self.t_arrive:
            raise ValidationError("t_depart precedes t_arrive")
        _finite("mean_accuracy", self.mean_accuracy)
        if self.mean_accuracy <= 0:
            raise ValidationError("accuracy must be positive")
        i, j = self.member_range
        if not (0 <= i <= j):
            raise ValidationError(f"bad member_range {self.member_range}")
        object.__setattr__(self, "member_range", (int(i), int(j)))

    @property
    def duration(self) -> int:
        return self.t_depart - self.t_arrive

    def to_dict(self) -> dict:
        d = asdict(self)
        d["member_range"] = list(self.member_range)
        return d

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "StayPoint":
        i, j = d["member_range"]
        return cls(str(d["user_id"]), float(d["centroid_lat"]), float(d["centroid_lon"]),
                   int(d["t_arrive"]), int(d["t_depart"]), float(d["mean_accuracy"]),
                   (int(i), int(j)))


@dataclass(frozen=True)
class PoiCluster:
    """Stay points grouped into one place; the centroid is the mean of member centroids."""

    cluster_id: int
    members: tuple[StayPoint, ...]
    user_id: Optional[str] = None
    centroid_lat: float = field(init=False)
    centroid_lon: float = field(init=False)

    def __post_init__(self):
        if isinstance(self.cluster_id, bool) or not isinstance(self.cluster_id, int) or self.cluster_id < 1:
            raise ValidationError("cluster_id must be an integer >= 1")
        if not self.members:
            raise ValidationError("a cluster needs at least one stay point")
        object.__setattr__(self, "members", tuple(self.members))
        n = len(self.members)
        object.__setattr__(self, "centroid_lat", sum(m.centroid_lat for m in self.members) / n)
        object.__setattr__(self, "centroid_lon", sum(m.centroid_lon for m in self.members) / n)

    @property
    def first_arrive(self) -> int:
        return min(m.t_arrive for m in self.members)

    @property
    def last_depart(self) -> int:
        return max(m.t_depart for m in self.members)

    def to_dict(self) -> dict:
        return {
            "cluster_id": self.cluster_id,
            "user_id": self.user_id,
            "centroid_lat": self.centroid_lat,
            "centroid_lon": self.centroid_lon,
            "members": [m.to_dict() for m in self.members],
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "PoiCluster":
        return cls(int(d["cluster_id"]), tuple(StayPoint.from_dict(m) for m in d["members"]),
                   d.get("user_id"))


@dataclass(frozen=True)
class Visit:
    cluster_id: int
    t_arrive: int
    t_depart: int

    def __post_init__(self):
        _check_time("t_arrive", self.t_arrive)
        _check_time("t_depart", self.t_depart)
        if self.t_depart < self.t_arrive:
            raise ValidationError("t_depart precedes t_arrive")


@dataclass(frozen=True)
class Trajectory:
    """Time-ordered, non-overlapping POI visits of one user."""

    user_id: str
    visits: tuple[Visit, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "visits", tuple(self.visits))
        for a, b in zip(self.visits, self.visits[1:]):
            if b.t_arrive < a.t_arrive or b.t_arrive <= a.t_depart:
                raise ValidationError("visits must be sorted and non-overlapping")

    def __len__(self):
        return len(self.visits)

    def to_dict(self) -> dict:
        return {"user_id": self.user_id, "visits": [asdict(v) for v in self.visits]}

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "Trajectory":
        return cls(str(d["user_id"]), tuple(Visit(**v) for v in d["visits"]))


ENV_CODES = (1, 2, 3, 4)


@dataclass(frozen=True)
class EnvReport:
    """Per-POI environment confidences in percent; ``p`` omits codes with no data."""

    poi_cluster_id: int
    n_slots: int
    p: Mapping[int, float]
    p0: float
    io_label: IOLabel
    pp_label: PPLabel
    low_confidence_io: bool = False
    low_confidence_pp: bool = False
    user_id: Optional[str] = None

    def __post_init__(self):
        p = {int(c): float(v) for c, v in dict(self.p).items()}
        for c, v in p.items():
            if c not in ENV_CODES:
                raise ValidationError(f"unknown environment code {c}")
            if not 0.0 <= v <= 100.0:
                raise ValidationError(f"P{c} = {v} outside [0, 100]")
        object.__setattr__(self, "p", p)
        if not 0.0 <= self.p0 <= 100.0:
            raise ValidationError(f"P0 = {self.p0} outside [0, 100]")
        object.__setattr__(self, "io_label", IOLabel(self.io_label))
        object.__setattr__(self, "pp_label", PPLabel(self.pp_label))
        # the converse does not hold: an exact P1 == P2 tie is also Unknown
        if 1 not in p and 2 not in p and self.io_label != IOLabel.UNKNOWN:
            raise ValidationError("io_label must be Unknown when P1 and P2 are both absent")
        if 3 not in p and 4 not in p and self.pp_label != PPLabel.UNKNOWN:
            raise ValidationError("pp_label must be Unknown when P3 and P4 are both absent")

    def to_dict(self) -> dict:
        return {
            "poi_cluster_id": self.poi_cluster_id,
            "user_id": self.user_id,
            "n_slots": self.n_slots,
            "p": {str(c): v for c, v in sorted(self.p.items())},
            "p0": self.p0,
            "io_label": self.io_label.value,
            "pp_label": self.pp_label.value,
            "low_confidence_io": self.low_confidence_io,
            "low_confidence_pp": self.low_confidence_pp,
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "EnvReport":
        return cls(
            int(d["poi_cluster_id"]), int(d["n_slots"]),
            {int(c): float(v) for c, v in d["p"].items()}, float(d["p0"]),
            IOLabel(d["io_label"]), PPLabel(d["pp_label"]),
            bool(d.get("low_confidence_io", False)), bool(d.get("low_confidence_pp", False)),
            d.get("user_id"),
        )


@dataclass(frozen=True)
class PipelineConfig:
    """Thresholds for every stage. Distances in meters, times in seconds."""

    theta_t_min_stay: float = 1800
    theta_t_gap: float = 1200
    theta_d_valid: float = 200
    theta_l_eps_cap: float = 200
    th_g: float = 30
    th_n: float = 5
    th_l: float = 1000
    slot_len: int = 300
    earth_radius: float = 6371000.0
    label_margin_warn: float = 10
    noise_window: int = 30 * 86400
    min_pts: int = 1

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            _finite(f.name, v)
            if v <= 0:
                raise ValidationError(f"{f.name} must be strictly positive")
        if self.slot_len != int(self.slot_len):
            raise ValidationError("slot_len must be whole seconds")
        if self.noise_window % self.slot_len:
            raise ValidationError("slot_len must divide noise_window evenly")
        if self.min_pts != int(self.min_pts):
            raise ValidationError("min_pts must be an integer")

    def replace(self, **changes) -> "PipelineConfig":
        d = self.to_dict()
        d.update({k: v for k, v in changes.items() if v is not None})
        return PipelineConfig.from_dict(d)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "PipelineConfig":
        known = {f.name: f for f in fields(cls)}
        unknown = set(d) - set(known)
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        kw = {}
        for k, v in d.items():
            kw[k] = int(v) if k in ("slot_len", "noise_window", "min_pts") else float(v)
        return cls(**kw)


# -- row validation ---------------------------------------------------------

LOCATION_COLUMNS = ("user_id", "t", "lat", "lon", "accuracy")
SENSOR_COLUMNS = ("user_id", "t", "velocity", "accuracy", "noise_raw",
                  "battery_charging", "light", "activity")


def _num(record: Mapping[str, Any], name: str, required: bool = True) -> Optional[float]:
    raw = record.get(name)
    if raw is None or (isinstance(raw, str) and raw.strip() == ""):
        if required:
            raise ValidationError(f"missing {name}")
        return None
    try:
        v = float(raw)
    except (TypeError, ValueError):
        raise ValidationError(f"{name} is not a number: {raw!r}") from None
    if not math.isfinite(v):
        raise ValidationError(f"{name} must be finite")
    return v


def _timestamp(record: Mapping[str, Any]) -> int:
    # sub-second precision is dropped
    return math.floor(_num(record, "t"))


def validate_sample(record: Mapping[str, Any], kind: str = "location",
                    row: Optional[int] = None):
    """Turn one parsed input row into a typed sample.

    ``kind`` is ``"location"`` or ``"sensor"``. Raises :class:`ValidationError`
    carrying ``row`` and a human-readable reason.
    """
    try:
        user = str(record.get("user_id") or "").strip()
        if not user:
            raise ValidationError("missing user_id")
        t = _timestamp(record)
        if kind == "location":
            return LocationSample(user, t, _num(record, "lat"), _num(record, "lon"),
                                  _num(record, "accuracy"))
        if kind == "sensor":
            bat = _num(record, "battery_charging", required=False)
            if bat is not None and bat not in (0.0, 1.0):
                raise ValidationError("battery_charging must be 0 or 1")
            act = record.get("activity")
            act = None if act is None or str(act).strip() == "" else Activity.parse(str(act))
            return SensorSample(
                user, t,
                velocity=_num(record, "velocity", False),
                accuracy=_num(record, "accuracy", False),
                noise_raw=_num(record, "noise_raw", False),
                noise_norm=_num(record, "noise_norm", False),
                battery_charging=None if bat is None else int(bat),
                light=_num(record, "light", False),
                activity=act,
            )
        raise ValueError(f"unknown sample kind {kind!r}")
    except ValidationError as exc:
        raise ValidationError(exc.reason, row) from None
