"""Preprocessing: duplicate removal, noise normalization and time alignment."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence, TypeVar

from .model import Activity, LocationSample, SensorSample, ValidationError

S = TypeVar("S", LocationSample, SensorSample)


def denoise(samples: Iterable[S]) -> list[S]:
    """Sort by timestamp and drop repeated timestamps, keeping the first seen."""
    seen = set()
    kept = []
    for s in samples:
        if s.t in seen:
            continue
        seen.add(s.t)
        kept.append(s)
    kept.sort(key=lambda s: s.t)
    return kept


@dataclass(frozen=True)
class NoiseNormalizer:
    s_min: float
    s_max: float
    window: Optional[tuple[int, int]] = None

    def __post_init__(self):
        for v in (self.s_min, self.s_max):
            if not math.isfinite(v) or v < 0:
                raise ValidationError("noise bounds must be finite and nonnegative")
        if self.s_min > self.s_max:
            raise ValidationError("s_min exceeds s_max")

    def __call__(self, s: float) -> float:
        return normalize_noise(s, self)


def fit_noise_normalizer(samples: Iterable[SensorSample],
                         window: Optional[tuple[int, int]] = None) -> NoiseNormalizer:
    """Min/max of the raw noise amplitudes inside ``window = [start, end)``.

    With ``window=None`` every sample counts.
    """
    values = [
        s.noise_raw for s in samples
        if s.noise_raw is not None and (window is None or window[0] <= s.t < window[1])
    ]
    if not values:
        raise ValidationError("no noise data in window")
    return NoiseNormalizer(min(values), max(values), window)


def normalize_noise(s: float, norm: NoiseNormalizer) -> float:
    """Map a raw amplitude onto the 0..10 loudness scale of ``norm``.

    Values outside the fitted range are clamped; a constant noise floor maps to 0.
    """
    span = norm.s_max - norm.s_min
    if span <= 0:
        return 0.0
    if s <= norm.s_min:
        return 0.0
    if s >= norm.s_max:
        return 10.0
    return min(10.0, max(0.0, 10.0 * (s - norm.s_min) / span))


def normalize_series(samples: Sequence[SensorSample], window_len: int) -> list[SensorSample]:
    """Fill ``noise_norm`` for one user's sensor series.

    The series is cut into consecutive windows of ``window_len`` seconds
    starting at the first sample; each window gets its own normalizer.
    Windows with no noise data leave ``noise_norm`` unset.
    """
    if not samples:
        return []
    t0 = min(s.t for s in samples)
    buckets: dict[int, list[SensorSample]] = {}
    for s in samples:
        buckets.setdefault((s.t - t0) // window_len, []).append(s)
    norms = {}
    for b, group in buckets.items():
        try:
            norms[b] = fit_noise_normalizer(group)
        except ValidationError:
            norms[b] = None
    out = []
    for s in samples:
        norm = norms[(s.t - t0) // window_len]
        if s.noise_raw is None or norm is None:
            out.append(s)
        else:
            out.append(replace(s, noise_norm=normalize_noise(s.noise_raw, norm)))
    return out


@dataclass(frozen=True)
class SensorAggregate:
    noise_norm: Optional[float]     # y, mean normalized noise
    battery: Optional[int]          # beta
    light: Optional[float]          # mean lux
    light_high: Optional[int]       # l
    activity: Optional[Activity]    # dominant activity

    @property
    def still(self) -> int:
        return int(self.activity == Activity.STILL)

    @property
    def walking(self) -> int:
        return int(self.activity == Activity.WALKING)


@dataclass(frozen=True)
class AlignedSlot:
    slot_start: int
    accuracy: Optional[float] = None            # x, mean GPS accuracy
    sensors: Optional[SensorAggregate] = None
    n_location: int = 0
    n_sensor: int = 0


def _mean(values):
    return sum(values) / len(values) if values else None


def _aggregate_sensors(group: Sequence[SensorSample], th_l: float) -> SensorAggregate:
    noise = [s.noise_norm for s in group if s.noise_norm is not None]
    bats = [s.battery_charging for s in group if s.battery_charging is not None]
    lights = [s.light for s in group if s.light is not None]
    acts = Counter(s.activity for s in group if s.activity is not None)
    light = _mean(lights)
    dominant = None
    if acts:
        top = max(acts.values())
        dominant = min(a for a, c in acts.items() if c == top)
    return SensorAggregate(
        noise_norm=_mean(noise),
        battery=(1 if any(bats) else 0) if bats else None,
        light=light,
        light_high=None if light is None else int(light > th_l),
        activity=dominant,
    )


def time_sync(loc: Sequence[LocationSample], sen: Sequence[SensorSample],
              slot_len: int = 300, start: Optional[int] = None, end: Optional[int] = None,
              th_l: float = 1000) -> list[AlignedSlot]:
    """Align location and sensor samples onto a common ``slot_len`` grid.

    Returns one slot per grid cell intersecting ``[start, end)``. When the range
    is omitted it spans all input samples. Samples outside the range are ignored.
    """
    if start is None or end is None:
        ts = [s.t for s in loc] + [s.t for s in sen]
        if not ts:
            return []
        start = min(ts) if start is None else start
        end = max(ts) + 1 if end is None else end
    if end <= start:
        return []
    first = (start // slot_len) * slot_len
    n = -(-(end - first) // slot_len)
    loc_by: dict[int, list[LocationSample]] = {}
    sen_by: dict[int, list[SensorSample]] = {}
    for s in loc:
        if start <= s.t < end:
            loc_by.setdefault((s.t - first) // slot_len, []).append(s)
    for s in sen:
        if start <= s.t < end:
            sen_by.setdefault((s.t - first) // slot_len, []).append(s)
    slots = []
    for k in range(n):
        lg = loc_by.get(k, [])
        sg = sen_by.get(k, [])
        slots.append(AlignedSlot(
            slot_start=first + k * slot_len,
            accuracy=_mean([s.accuracy for s in lg]),
            sensors=_aggregate_sensors(sg, th_l) if sg else None,
            n_location=len(lg),
            n_sensor=len(sg),
        ))
    return slots
