"""Sensor-fusion environment classification of POIs.

Each 5-minute slot of a POI visit gets a confidence for four environment
codes: 1 indoor, 2 outdoor, 3 private, 4 public. Indoor/outdoor is driven
by the mean GPS accuracy ``x`` against ``th_g`` (90%), with battery charging
and stillness (indoor) or bright light (outdoor) for the remaining 10%.
Private/public is driven by the mean normalized noise ``y`` against ``th_n``
(90%), with stillness (private) or walking (public) for the rest.

Slot confidences are clamped to [0, 1]. A POI's percentage for code ``c`` is
the sum of its slot confidences over *all* slots divided by the slot count,
so slots without data pull the percentage down rather than being skipped.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .model import (EnvReport, IOLabel, LocationSample, PipelineConfig, PPLabel,
                    SensorSample, ValidationError)
from .prep import AlignedSlot, time_sync


def _clamp01(v: float) -> float:
    return min(1.0, max(0.0, v))


@dataclass(frozen=True)
class SlotConfidence:
    slot_start: int
    s: Mapping[int, float] = field(default_factory=dict)
    io_missing: bool = True
    pp_missing: bool = True

    @property
    def unclassified(self) -> bool:
        return self.io_missing and self.pp_missing


def slot_confidences(slot: AlignedSlot, cfg: PipelineConfig = PipelineConfig()) -> SlotConfidence:
    s: dict[int, float] = {}
    x = slot.accuracy
    sen = slot.sensors
    beta = (sen.battery or 0) if sen else 0
    still = sen.still if sen else 0
    walking = sen.walking if sen else 0
    light = (sen.light_high or 0) if sen else 0
    y = sen.noise_norm if sen else None

    if x is not None:
        g = cfg.th_g
        if x > g:
            s[1] = _clamp01((x - g) / g * 0.9 + (beta + still) * 0.05)
        elif x < g:
            s[2] = _clamp01((g - x) / g * 0.9 + light * 0.1)
    if y is not None:
        tn = cfg.th_n
        if y < tn:
            s[3] = _clamp01((tn - y) / tn * 0.9 + still * 0.1)
        elif y > tn:
            s[4] = _clamp01((y - tn) / tn * 0.9 + walking * 0.1)
    return SlotConfidence(slot.slot_start, s, io_missing=x is None, pp_missing=y is None)


def poi_confidence(slots: Sequence[SlotConfidence]) -> tuple[dict[int, float], float]:
    """Average slot confidences into percentages ``(p, p0)``.

    Codes that no slot supports are left out of ``p`` (shown as "-").
    """
    n = len(slots)
    if n == 0:
        raise ValidationError("POI has no slots")
    p = {}
    for c in (1, 2, 3, 4):
        present = [sc.s[c] for sc in slots if c in sc.s]
        if present:
            p[c] = min(100.0, 100.0 * sum(present) / n)
    p0 = 100.0 * sum(sc.unclassified for sc in slots) / n
    return p, p0


def _pick(a: Optional[float], b: Optional[float], first, second, unknown):
    if a is None and b is None:
        return unknown
    if b is None or (a is not None and a > b):
        return first
    if a is None or b > a:
        return second
    return unknown


def estimate_labels(p: Mapping[int, float], margin: float = 10.0):
    """Labels from POI percentages.

    Returns ``(io_label, pp_label, low_confidence_io, low_confidence_pp)``. A
    low-confidence flag marks an axis where both percentages exist but differ
    by less than ``margin`` points.
    """
    p1, p2, p3, p4 = (p.get(c) for c in (1, 2, 3, 4))
    io = _pick(p1, p2, IOLabel.INDOOR, IOLabel.OUTDOOR, IOLabel.UNKNOWN)
    pp = _pick(p3, p4, PPLabel.PRIVATE, PPLabel.PUBLIC, PPLabel.UNKNOWN)
    warn_io = p1 is not None and p2 is not None and abs(p1 - p2) < margin
    warn_pp = p3 is not None and p4 is not None and abs(p3 - p4) < margin
    return io, pp, warn_io, warn_pp


def poi_slots(intervals: Iterable[tuple[int, int]], loc: Sequence[LocationSample],
              sen: Sequence[SensorSample], cfg: PipelineConfig = PipelineConfig()) -> list[AlignedSlot]:
    """Aligned slots covering each closed visit interval ``[t_arrive, t_depart]``."""
    slots = []
    for t0, t1 in intervals:
        slots.extend(time_sync(loc, sen, int(cfg.slot_len), t0, t1 + 1, cfg.th_l))
    return slots


def classify_poi(cluster_id: int, intervals: Iterable[tuple[int, int]],
                 loc: Sequence[LocationSample], sen: Sequence[SensorSample],
                 cfg: PipelineConfig = PipelineConfig(), user_id: Optional[str] = None) -> EnvReport:
    slots = poi_slots(intervals, loc, sen, cfg)
    confs = [slot_confidences(sl, cfg) for sl in slots]
    p, p0 = poi_confidence(confs)
    io, pp, warn_io, warn_pp = estimate_labels(p, cfg.label_margin_warn)
    return EnvReport(cluster_id, len(slots), p, p0, io, pp, warn_io, warn_pp, user_id)
