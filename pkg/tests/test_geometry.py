import math

import pytest
from hypothesis import given, strategies as st

from conftest import circ_diff
from flowseek.errors import InvalidArgumentError, UndefinedBearingError
from flowseek.geometry import (
    Vec2, bearing, body_to_world, rotate, unit, world_to_body, wrap180, wrap360,
)

angles = st.floats(-1e6, 1e6, allow_nan=False)
coords = st.floats(-1e3, 1e3, allow_nan=False)


@pytest.mark.parametrize("a, expected", [(0, 0), (360, 0), (-90, 270), (725, 5), (-360, 0), (359.5, 359.5)])
def test_wrap360_examples(a, expected):
    assert wrap360(a) == pytest.approx(expected)


@pytest.mark.parametrize("a, expected", [(180, 180), (-180, 180), (190, -170), (-190, 170), (0, 0), (540, 180)])
def test_wrap180_examples(a, expected):
    assert wrap180(a) == pytest.approx(expected)


def test_wrap_tiny_negative_stays_in_range():
    assert 0.0 <= wrap360(-1e-18) < 360.0


@given(angles)
def test_wrap_ranges(a):
    assert 0.0 <= wrap360(a) < 360.0
    assert -180.0 < wrap180(a) <= 180.0
    assert circ_diff(wrap360(a), a % 360.0) < 1e-6


def test_nonfinite_rejected():
    with pytest.raises(InvalidArgumentError):
        wrap360(math.nan)
    with pytest.raises(InvalidArgumentError):
        rotate(Vec2(math.inf, 0.0), 10.0)


def test_rotation_examples():
    v = rotate(Vec2(1.0, 0.0), 90.0)
    assert v.x == pytest.approx(0.0, abs=1e-15) and v.y == pytest.approx(1.0)


def test_body_frame_left_is_plus_y():
    # vehicle facing +Y in the world: its left is world -X
    left = body_to_world(Vec2(0.0, 1.0), 90.0)
    assert left.x == pytest.approx(-1.0) and left.y == pytest.approx(0.0, abs=1e-15)
    # a point ahead of a vehicle facing +Y is at body +X
    ahead = world_to_body(Vec2(0.0, 2.0), 90.0)
    assert ahead.x == pytest.approx(2.0) and ahead.y == pytest.approx(0.0, abs=1e-15)


@given(coords, coords, angles)
def test_frame_round_trip(x, y, yaw):
    v = Vec2(x, y)
    back = body_to_world(world_to_body(v, yaw), yaw)
    assert back.x == pytest.approx(x, abs=1e-9) and back.y == pytest.approx(y, abs=1e-9)


@given(coords, coords, angles)
def test_rotation_preserves_norm(x, y, a):
    assert rotate(Vec2(x, y), a).norm() == pytest.approx(math.hypot(x, y), abs=1e-9)


def test_bearing_examples():
    assert bearing(Vec2(1.0, 0.0)) == 0.0
    assert bearing(Vec2(0.0, -2.0)) == pytest.approx(270.0)
    assert bearing(Vec2(-1.0, 0.0)) == pytest.approx(180.0)
    with pytest.raises(UndefinedBearingError):
        bearing(Vec2(0.0, 0.0))


@given(st.floats(0, 359.999))
def test_unit_bearing_inverse(a):
    assert circ_diff(bearing(unit(a)), a) < 1e-9


def test_vec2_algebra():
    a, b = Vec2(1.0, 2.0), Vec2(3.0, -1.0)
    assert a + b == Vec2(4.0, 1.0)
    assert a - b == Vec2(-2.0, 3.0)
    assert 2 * a == a * 2 == Vec2(2.0, 4.0)
    assert -a == Vec2(-1.0, -2.0)
    assert a.dot(b) == 1.0
    assert a.cross(b) == -7.0


def test_world_to_body_examples():
    assert world_to_body(Vec2(1.0, 0.0), 0.0) == Vec2(1.0, 0.0)
    v = world_to_body(Vec2(1.0, 0.0), 90.0)
    assert v.x == pytest.approx(0.0, abs=1e-15) and v.y == pytest.approx(-1.0)
    for yaw in (0.0, 17.0, 123.4, -300.0):
        assert world_to_body(Vec2(3.0, 4.0), yaw).norm() == pytest.approx(5.0, abs=1e-12)


@given(angles)
def test_wraps_idempotent_and_consistent(a):
    assert wrap360(wrap360(a)) == wrap360(a)
    assert wrap180(wrap180(a)) == wrap180(a)
    assert circ_diff(wrap180(a), wrap360(a)) < 1e-9


@given(st.floats(-10, 10), st.floats(-10, 10), st.floats(-720, 720))
def test_body_round_trip_tight(x, y, yaw):
    v = world_to_body(body_to_world(Vec2(x, y), yaw), yaw)
    assert abs(v.x - x) < 1e-12 * max(1.0, abs(x) + abs(y)) * 10
    assert abs(v.y - y) < 1e-12 * max(1.0, abs(x) + abs(y)) * 10
