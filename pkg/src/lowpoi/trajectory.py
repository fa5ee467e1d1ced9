"""Stay points labelled with their POI, as a time-ordered visit sequence."""

from __future__ import annotations

from typing import Optional, Sequence

from .model import PoiCluster, StayPoint, Trajectory, ValidationError, Visit


def cluster_index(clusters: Sequence[PoiCluster]) -> dict[StayPoint, int]:
    index = {}
    for c in clusters:
        for m in c.members:
            if m in index:
                raise ValidationError("stay point assigned to more than one cluster")
            index[m] = c.cluster_id
    return index


def build_trajectory(stay_points: Sequence[StayPoint], clusters: Sequence[PoiCluster],
                     slot_len: int = 300, user_id: Optional[str] = None) -> Trajectory:
    """Visits ``(cluster_id, t_arrive, t_depart)`` sorted by arrival.

    Back-to-back visits to the same cluster separated by less than ``slot_len``
    seconds are merged: a gap shorter than one sampling interval is no evidence
    of having left.
    """
    if user_id is None:
        user_id = stay_points[0].user_id if stay_points else ""
    index = cluster_index(clusters)
    visits: list[Visit] = []
    for sp in sorted(stay_points, key=lambda s: (s.t_arrive, s.t_depart)):
        try:
            cid = index[sp]
        except KeyError:
            raise ValidationError(f"stay point at t={sp.t_arrive} has no cluster") from None
        if visits and visits[-1].cluster_id == cid and sp.t_arrive - visits[-1].t_depart < slot_len:
            last = visits.pop()
            visits.append(Visit(cid, last.t_arrive, max(last.t_depart, sp.t_depart)))
        else:
            visits.append(Visit(cid, sp.t_arrive, sp.t_depart))
    return Trajectory(user_id, tuple(visits))
