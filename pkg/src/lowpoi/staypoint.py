"""Stay-point detection for sparse (minutes-apart) GPS series.

``detect_vspd`` is the classic anchor/extend stay-point scan with two
changes for low sampling rates: the spatial bound adapts to the reported GPS
accuracy of the two compared fixes (capped at ``theta_l_eps_cap``), and a
candidate dwell is kept only if every consecutive pair of fixes inside it is
plausible, i.e. closer in time than ``theta_t_gap`` and in space than
``theta_d_valid``. The second check rejects "dwells" that are really a frozen
GPS reading across a signal dropout, such as a tunnel.

``detect_baseline`` runs the same scan without the plausibility check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .geo import haversine_distance
from .model import LocationSample, PipelineConfig, StayPoint


def pair_eps(a_i: float, a_prev: float, theta_l: float = 200.0) -> float:
    """Adaptive reach between two fixes: their accuracy sum, capped at ``theta_l``."""
    s = a_i + a_prev
    return s if s < theta_l else theta_l


def validity(d: float, dt: float, cfg: PipelineConfig) -> bool:
    """Plausibility of one consecutive pair (distance ``d`` m, gap ``dt`` s)."""
    return dt < cfg.theta_t_gap and d < cfg.theta_d_valid


@dataclass(frozen=True)
class CandidateSegment:
    i: int
    j: int
    span_distance: float
    span_time: int


def segment_is_valid(samples: Sequence[LocationSample], i: int, j: int,
                     cfg: PipelineConfig) -> bool:
    """True when every consecutive pair in ``samples[i..j]`` passes :func:`validity`."""
    r = cfg.earth_radius
    for k in range(i, j):
        a, b = samples[k], samples[k + 1]
        d = haversine_distance((a.lat, a.lon), (b.lat, b.lon), r)
        if not validity(d, b.t - a.t, cfg):
            return False
    return True


def make_stay_point(samples: Sequence[LocationSample], i: int, j: int) -> StayPoint:
    members = samples[i:j + 1]
    n = len(members)
    return StayPoint(
        user_id=members[0].user_id,
        centroid_lat=sum(s.lat for s in members) / n,
        centroid_lon=sum(s.lon for s in members) / n,
        t_arrive=members[0].t,
        t_depart=members[-1].t,
        mean_accuracy=sum(s.accuracy for s in members) / n,
        member_range=(i, j),
    )


def candidate_segments(samples: Sequence[LocationSample], cfg: PipelineConfig,
                       accept: Callable[[int, int], bool]):
    """Yield ``(CandidateSegment, accepted)`` for every maximal window the scan visits.

    From anchor ``k`` the window grows while the next fix stays within the
    adaptive reach of the anchor. Whether or not the window is accepted, the
    next anchor is the first fix past it, so validated and unvalidated scans
    visit the same windows.
    """
    n = len(samples)
    r, cap = cfg.earth_radius, cfg.theta_l_eps_cap
    k = 0
    while k < n - 1:
        anchor = samples[k]
        j = k + 1
        d_last = 0.0
        while j < n:
            p = samples[j]
            d = haversine_distance((anchor.lat, anchor.lon), (p.lat, p.lon), r)
            if d > pair_eps(p.accuracy, anchor.accuracy, cap):
                break
            d_last = d
            j += 1
        end = j - 1
        span = samples[end].t - anchor.t
        seg = CandidateSegment(k, end, d_last, span)
        ok = end > k and span > cfg.theta_t_min_stay and accept(k, end)
        yield seg, ok
        k = j


def _detect(samples, cfg, validate: bool) -> list[StayPoint]:
    samples = list(samples)
    if validate:
        accept = lambda i, j: segment_is_valid(samples, i, j, cfg)  # noqa: E731
    else:
        accept = lambda i, j: True  # noqa: E731
    return [make_stay_point(samples, s.i, s.j)
            for s, ok in candidate_segments(samples, cfg, accept) if ok]


def detect_vspd(samples: Sequence[LocationSample], cfg: PipelineConfig = PipelineConfig()) -> list[StayPoint]:
    """Validated stay points of one user's denoised, time-sorted series."""
    return _detect(samples, cfg, validate=True)


def detect_baseline(samples: Sequence[LocationSample], cfg: PipelineConfig = PipelineConfig()) -> list[StayPoint]:
    """Same scan as :func:`detect_vspd` with the plausibility check switched off."""
    return _detect(samples, cfg, validate=False)
