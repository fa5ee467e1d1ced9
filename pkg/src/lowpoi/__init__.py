"""Point-of-interest extraction and environment classification for
low-sampling-rate smartphone location and sensor logs."""

__version__ = "0.1.0"

from .geo import haversine_distance, hav
from .model import (Activity, EnvReport, IOLabel, LocationSample, PipelineConfig, PoiCluster,
                    PPLabel, SensorSample, StayPoint, Trajectory, ValidationError, Visit,
                    validate_sample)
from .prep import denoise, fit_noise_normalizer, normalize_noise, time_sync
from .staypoint import detect_baseline, detect_vspd, pair_eps, validity
from .cluster import dbscan_poi, hierarchical_poi, kmeans_poi
from .trajectory import build_trajectory
from .sfec import estimate_labels, poi_confidence, slot_confidences

__all__ = [
    "haversine_distance", "hav",
    "Activity", "EnvReport", "IOLabel", "LocationSample", "PipelineConfig", "PoiCluster", "PPLabel",
    "SensorSample", "StayPoint", "Trajectory", "ValidationError", "Visit", "validate_sample",
    "denoise", "fit_noise_normalizer", "normalize_noise", "time_sync",
    "detect_baseline", "detect_vspd", "pair_eps", "validity",
    "dbscan_poi", "hierarchical_poi", "kmeans_poi",
    "build_trajectory",
    "estimate_labels", "poi_confidence", "slot_confidences",
]
