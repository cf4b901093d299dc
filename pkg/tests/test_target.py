import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from circumnav import target
from circumnav.errors import FormatError, InvalidTargetError, OutOfRangeError
from circumnav.geometry import Vec2, signed_boundary_distance
from circumnav.target import BoundaryPerturbation, TargetState

ORIGIN = Vec2(0.0, 0.0)
NO_PERT = BoundaryPerturbation()


def test_constant_sample():
    traj = target.constant(ORIGIN, 10.0, 100.0)
    for t in (0.0, 3.3, 100.0):
        s = target.sample(traj, t)
        assert (s.c, s.r, s.t) == (ORIGIN, 10.0, t)


def test_linear_drift_sample():
    s = target.sample(target.linear_drift(ORIGIN, 10.0, Vec2(0.1, 0.0), 100.0), 20.0)
    assert s.c.x == pytest.approx(2.0, abs=1e-15)
    assert s.c.y == 0.0
    assert s.r == 10.0


def test_sinusoidal_peak():
    w = 0.05
    traj = target.sinusoidal(ORIGIN, 10.0, 100.0, osc_r=(2.0, w))
    assert target.sample(traj, math.pi / (2 * w)).r == pytest.approx(12.0, abs=1e-12)


def test_sample_out_of_range():
    traj = target.constant(ORIGIN, 10.0, 5.0)
    with pytest.raises(OutOfRangeError):
        target.sample(traj, 5.0 + 1e-9)
    with pytest.raises(OutOfRangeError):
        target.sample(traj, -1e-9)


def test_derivative_bounds_examples():
    assert target.derivative_bounds(target.constant(ORIGIN, 10.0, 1.0)) == (0.0, 0.0)
    eps = target.derivative_bounds(target.linear_drift(ORIGIN, 10.0, Vec2(0.3, 0.4), 1.0))
    assert eps[0] == pytest.approx(0.5, abs=1e-15)
    assert eps[1] == 0.0
    eps = target.derivative_bounds(target.sinusoidal(ORIGIN, 10.0, 1.0, osc_r=(2.0, 0.05)))
    assert eps[1] == pytest.approx(0.1, abs=1e-15)


def _trajectories():
    return [
        target.constant(Vec2(1.0, -2.0), 7.0, 50.0),
        target.linear_drift(ORIGIN, 10.0, Vec2(0.3, -0.2), 50.0, r_rate=0.05),
        target.sinusoidal(ORIGIN, 14.0, 50.0, osc_x=(3.0, 0.4), osc_y=(2.0, 0.7),
                          osc_r=(4.0, 0.3), velocity=Vec2(0.02, 0.01)),
        target.load_waypoints([(0, 0, 0, 10), (10, 3, 1, 12), (25, -2, 4, 9), (50, 0, 0, 11)]),
    ]


@pytest.mark.parametrize("traj", _trajectories(), ids=lambda t: t.kind)
def test_derivative_bounds_dominate_finite_differences(traj):
    eps1, eps2 = target.derivative_bounds(traj)
    h = 1.0 / 10  # dt = 1
    rng = np.random.default_rng(3)
    for t in rng.uniform(h, traj.horizon - h, 10_000):
        a, b = target.sample(traj, t - h), target.sample(traj, t + h)
        cdot = math.hypot(b.c.x - a.c.x, b.c.y - a.c.y) / (2 * h)
        rdot = abs(b.r - a.r) / (2 * h)
        assert cdot <= eps1 + 1e-6
        assert rdot <= eps2 + 1e-6


def test_measured_distance_examples():
    traj = target.constant(ORIGIN, 5.0, 1.0)
    assert target.measured_distance(traj, NO_PERT, Vec2(8, 0), 0.0) == 3.0
    p1 = BoundaryPerturbation(0.1, 1, 0.0)
    assert target.measured_distance(traj, p1, Vec2(0, 8), 0.0) == pytest.approx(2.5, abs=1e-12)
    p4 = BoundaryPerturbation(0.1, 4, 0.0)
    assert target.measured_distance(traj, p4, Vec2(5.5, 0), 0.0) == pytest.approx(0.5, abs=1e-12)


coord = st.floats(-100, 100, allow_nan=False)


@given(coord, coord, coord, coord, st.floats(0.1, 50))
def test_unperturbed_distance_matches_circle(px, py, cx, cy, r):
    traj = target.constant(Vec2(cx, cy), r, 1.0)
    p = Vec2(px, py)
    assert target.measured_distance(traj, NO_PERT, p, 0.5) == signed_boundary_distance(p, Vec2(cx, cy), r)


def test_sample_deterministic():
    traj = _trajectories()[2]
    assert target.sample(traj, 17.25) == target.sample(traj, 17.25)


def test_perturbation_bounds():
    with pytest.raises(ValueError):
        BoundaryPerturbation(eta=1.0)
    with pytest.raises(InvalidTargetError):
        TargetState(ORIGIN, 0.0)


def test_load_waypoints_examples():
    traj = target.load_waypoints([(0, 0, 0, 10), (10, 1, 0, 10)])
    s = target.sample(traj, 5.0)
    assert (s.c.x, s.c.y, s.r) == (0.5, 0.0, 10.0)
    traj = target.load_waypoints([(0, 0, 0, 10), (10, 0, 0, 12)])
    assert target.derivative_bounds(traj)[1] == pytest.approx(0.2)
    with pytest.raises(FormatError) as err:
        target.load_waypoints([(0, 0, 0, 10), (5, 0, 0, -1)])
    assert err.value.row == 2
    assert "row 2" in str(err.value)


@pytest.mark.parametrize("rows, bad_row", [
    ([(0, 0, 0, 10), (0, 1, 0, 10)], 2),
    ([(0, 0, 0, 10), (5, 0, 0, 10), (4, 0, 0, 10)], 3),
    ([(0, 0, 0, 10)], 1),
    ([(0, 0, 0, 10), ("x", 0, 0, 10)], 2),
])
def test_load_waypoints_errors(rows, bad_row):
    with pytest.raises(FormatError) as err:
        target.load_waypoints(rows)
    assert err.value.row == bad_row


def test_waypoint_times_are_relative():
    traj = target.load_waypoints([(100, 0, 0, 10), (110, 10, 0, 10)])
    assert traj.horizon == 10
    assert target.sample(traj, 2.5).c.x == 2.5


def test_read_waypoint_csv(tmp_path):
    text = "t,x,y,r\n0,0,0,10\n10,1,0,10\n"
    path = tmp_path / "wp.csv"
    path.write_text(text)
    assert target.read_waypoint_csv(path).waypoints == ((0, 0, 0, 10), (10, 1, 0, 10))
    assert target.read_waypoint_csv(text).horizon == 10
    with pytest.raises(FormatError):
        target.read_waypoint_csv("x,y\n1,2\n")


def test_min_radius_and_validate():
    traj = target.sinusoidal(ORIGIN, 5.0, 100.0, osc_r=(6.0, 0.1))
    assert target.min_radius(traj) < 0
    with pytest.raises(InvalidTargetError):
        target.validate(traj)
    target.validate(target.constant(ORIGIN, 1.0, 10.0))
