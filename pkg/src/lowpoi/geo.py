"""Great-circle geometry on a spherical earth.

Public inputs and outputs are in degrees and meters; radians stay internal.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

EARTH_RADIUS = 6371000.0


class GeoPoint(NamedTuple):
    lat: float
    lon: float


def hav(theta):
    """Haversine of an angle in radians, ``sin(theta / 2) ** 2``."""
    if np.isscalar(theta):
        return math.sin(theta / 2.0) ** 2
    return np.sin(np.asarray(theta) / 2.0) ** 2


def haversine_distance(p1, p2, r: float = EARTH_RADIUS) -> float:
    """Great-circle distance in meters between two ``(lat, lon)`` points in degrees."""
    phi1, lam1 = math.radians(p1[0]), math.radians(p1[1])
    phi2, lam2 = math.radians(p2[0]), math.radians(p2[1])
    h = hav(phi2 - phi1) + math.cos(phi1) * math.cos(phi2) * hav(lam2 - lam1)
    h = min(max(h, 0.0), 1.0)
    return 2.0 * r * math.asin(math.sqrt(h))


def haversine_matrix(lat, lon, r: float = EARTH_RADIUS) -> np.ndarray:
    """Pairwise distance matrix (meters) for coordinate arrays in degrees."""
    phi = np.radians(np.asarray(lat, dtype=float))
    lam = np.radians(np.asarray(lon, dtype=float))
    dphi = phi[:, None] - phi[None, :]
    dlam = lam[:, None] - lam[None, :]
    h = hav(dphi) + np.cos(phi)[:, None] * np.cos(phi)[None, :] * hav(dlam)
    d = 2.0 * r * np.arcsin(np.sqrt(np.clip(h, 0.0, 1.0)))
    # exact symmetry; the two triangle halves can differ in the last ulp
    d = np.minimum(d, d.T)
    np.fill_diagonal(d, 0.0)
    return d


def offset(lat: float, lon: float, north_m: float, east_m: float,
           r: float = EARTH_RADIUS) -> GeoPoint:
    """Move a point by small north/east displacements (meters). Flat-earth, city scale."""
    dlat = math.degrees(north_m / r)
    dlon = math.degrees(east_m / (r * math.cos(math.radians(lat))))
    return GeoPoint(lat + dlat, lon + dlon)
