import math

import pytest
from hypothesis import given, strategies as st

from flowseek.errors import InvalidArgumentError
from flowseek.geometry import Vec2
from flowseek.vehicle import (
    MAX_SPEED, MAX_YAW_RATE, Command, QuadState, VehicleParams, hold_position, step,
)

DT = 0.025


def settle(state, cmd, wind, params, seconds=10.0):
    for _ in range(int(seconds / DT)):
        state = step(state, cmd, wind, DT, params)
    return state


def test_equilibrium():
    s0 = QuadState(Vec2(1.0, 2.0), 30.0)
    s1 = step(s0, Command(), Vec2(0, 0), DT)
    assert (s1.pos, s1.yaw, s1.vel) == (s0.pos, s0.yaw, s0.vel)
    assert s1.t == pytest.approx(DT)


def test_velocity_steady_state():
    s = settle(QuadState(), Command(Vec2(0.2, 0.0)), Vec2(0, 0), VehicleParams())
    assert s.vel.x == pytest.approx(0.2, rel=1e-6) and s.vel.y == pytest.approx(0.0, abs=1e-12)


def test_wind_drift_steady_state():
    s = settle(QuadState(), Command(), Vec2(1.0, 0.0), VehicleParams(drift_gain=0.3))
    assert s.vel.x == pytest.approx(0.3, rel=1e-6)


def test_first_order_lag_closed_form():
    p = VehicleParams(tau=0.5)
    s = QuadState()
    n = 20
    for _ in range(n):
        s = step(s, Command(Vec2(0.2, 0.0)), Vec2(0, 0), DT, p)
    assert s.vel.x == pytest.approx(0.2 * (1 - math.exp(-n * DT / 0.5)), rel=1e-12)


def test_command_clamps():
    c = Command(Vec2(1.0, -1.0), 500.0)
    assert (c.v_body.x, c.v_body.y, c.yaw_rate) == (MAX_SPEED, -MAX_SPEED, MAX_YAW_RATE)
    with pytest.raises(InvalidArgumentError):
        Command(Vec2(math.nan, 0.0))


def test_yaw_integrates_and_wraps():
    s = QuadState(yaw=350.0)
    s = step(s, Command(yaw_rate=100.0), Vec2(0, 0), 0.1)
    assert s.yaw == pytest.approx(0.0, abs=1e-9) or s.yaw == pytest.approx(360.0)
    assert 0.0 <= s.yaw < 360.0


def test_step_validation():
    with pytest.raises(InvalidArgumentError):
        step(QuadState(), Command(), Vec2(0, 0), 0.0)
    with pytest.raises(InvalidArgumentError):
        step(QuadState(), Command(), Vec2(0, 0), 0.2)
    with pytest.raises(InvalidArgumentError):
        step(QuadState(), Command(), Vec2(math.inf, 0), DT)
    with pytest.raises(InvalidArgumentError):
        VehicleParams(tau=0.0).validate()


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(0, 360))
def test_zero_command_zero_wind_holds_position(x, y, yaw):
    s0 = QuadState(Vec2(x, y), yaw)
    s = settle(s0, Command(), Vec2(0, 0), VehicleParams(), seconds=2.0)
    assert s.pos == s0.pos


@given(st.floats(0, 360), st.floats(0.05, 1.5))
def test_drift_follows_wind(direction, speed):
    a = math.radians(direction)
    w = Vec2(speed * math.cos(a), speed * math.sin(a))
    s = settle(QuadState(), Command(), w, VehicleParams(), seconds=1.0)
    assert s.pos.cross(w) == pytest.approx(0.0, abs=1e-12)
    assert s.pos.dot(w) > 0


def test_step_deterministic():
    args = (QuadState(Vec2(1, 1), 45.0, Vec2(0.1, 0.0)), Command(Vec2(0.1, 0.1), 20.0), Vec2(0.3, -0.2), DT)
    assert step(*args) == step(*args)


def test_hold_position_points_at_target():
    s = QuadState(Vec2(0, 0), 90.0)
    v = hold_position(s, Vec2(0.0, 1.0), gain=0.5)
    assert v.x == pytest.approx(0.5) and v.y == pytest.approx(0.0, abs=1e-12)
