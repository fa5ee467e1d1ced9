import pytest

from lowpoi.geo import offset
from lowpoi.model import LocationSample, StayPoint

BASE = (1.3521, 103.8198)
_acceptance = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(name): exit criterion, reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _acceptance.append((marker.args[0], rep.outcome, rep.duration))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome, dur in _acceptance:
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name}  ({dur:.2f}s)")


def fix(t, north=0.0, east=0.0, acc=20.0, user="u1", origin=BASE):
    """A location sample displaced ``north``/``east`` meters from ``origin``."""
    p = offset(origin[0], origin[1], north, east)
    return LocationSample(user, int(t), p.lat, p.lon, float(acc))


def stay(north=0.0, east=0.0, acc=30.0, t0=0, dur=2400, user="u1", origin=BASE):
    p = offset(origin[0], origin[1], north, east)
    return StayPoint(user, p.lat, p.lon, int(t0), int(t0 + dur), float(acc), (0, 1))


@pytest.fixture
def make_fix():
    return fix


@pytest.fixture
def make_stay():
    return stay


def random_series(rng, n, user="u1"):
    """A jittery mix of dwells, jumps, frozen fixes and dropouts, sampled ~5 min apart."""
    t, north, east = 0, 0.0, 0.0
    out = []
    for _ in range(n):
        mode = rng.choice(["dwell", "dwell", "dwell", "jump", "freeze", "drift"])
        if mode == "jump":
            north += rng.uniform(-800, 800)
            east += rng.uniform(-800, 800)
        elif mode == "drift":
            north += rng.uniform(-120, 120)
            east += rng.uniform(-120, 120)
        jitter = 0.0 if mode == "freeze" else rng.uniform(0, 25)
        acc = float(rng.choice([8.0, 15.0, 30.0, 60.0, 120.0]) * rng.uniform(0.8, 1.2))
        out.append(fix(t, north + rng.normal(0, 1) * jitter, east + rng.normal(0, 1) * jitter, acc, user))
        t += int(rng.choice([300, 300, 300, 300, 600, 900, 1500, 3300]))
    return out
