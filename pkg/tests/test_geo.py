import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lowpoi.geo import hav, haversine_distance, haversine_matrix, offset
from oracles import law_of_cosines

R = 6371000.0


@pytest.mark.parametrize("theta,expected", [(0.0, 0.0), (math.pi, 1.0), (math.pi / 2, 0.5)])
def test_hav_values(theta, expected):
    assert hav(theta) == pytest.approx(expected, abs=1e-15)


@given(st.floats(-50, 50, allow_nan=False))
def test_hav_matches_cosine_form(theta):
    assert abs(hav(theta) - (1 - math.cos(theta)) / 2) <= 1e-12


def test_identity_and_antipode():
    p = (1.3521, 103.8198)
    assert haversine_distance(p, p) == 0.0
    assert haversine_distance((0, 0), (0, 180), R) == pytest.approx(math.pi * R, rel=1e-12)


def test_singapore_pair_against_law_of_cosines():
    # law of cosines evaluated at 40 significant digits: 8630.19389876758 m
    d = haversine_distance((1.3521, 103.8198), (1.2806, 103.8500), R)
    assert abs(d - 8630.1939) < 0.01


points = st.tuples(st.floats(-89.9, 89.9), st.floats(-180, 180))


@given(points, points)
def test_symmetry(a, b):
    assert haversine_distance(a, b) == haversine_distance(b, a)


@settings(max_examples=300)
@given(points, points, points)
def test_triangle_inequality(a, b, c):
    assert haversine_distance(a, c) <= haversine_distance(a, b) + haversine_distance(b, c) + 1e-6


def test_bounded_by_half_circumference():
    rng = np.random.default_rng(1)
    for _ in range(200):
        a = (rng.uniform(-90, 90), rng.uniform(-180, 180))
        b = (rng.uniform(-90, 90), rng.uniform(-180, 180))
        assert 0.0 <= haversine_distance(a, b) <= math.pi * R * (1 + 1e-15)


def test_matrix_matches_scalar():
    rng = np.random.default_rng(2)
    lat, lon = rng.uniform(1.2, 1.5, 30), rng.uniform(103.6, 104.0, 30)
    m = haversine_matrix(lat, lon)
    assert np.array_equal(m, m.T)
    assert np.all(np.diag(m) == 0)
    for i in range(0, 30, 7):
        for j in range(30):
            assert m[i, j] == pytest.approx(haversine_distance((lat[i], lon[i]), (lat[j], lon[j])), abs=1e-6)


def test_offset_moves_expected_distance():
    p = offset(1.35, 103.8, 300.0, 400.0)
    assert haversine_distance((1.35, 103.8), p) == pytest.approx(500.0, abs=0.05)
    assert law_of_cosines((1.35, 103.8), p) == pytest.approx(500.0, abs=0.05)
