import pytest
from hypothesis import given, strategies as st

from flowseek.control import (
    PdGains, ReorientMonitor, ReorientTracker, heading_error, reorient_done, yaw_rate_cmd,
)
from flowseek.errors import InvalidArgumentError

DT = 0.025


def test_heading_error_examples():
    assert heading_error(0.0) == 0.0
    assert heading_error(350.0) == pytest.approx(-10.0)
    assert heading_error(90.0) == 90.0
    assert heading_error(180.0) == 180.0  # tie turns counter-clockwise


def test_proportional_term():
    assert yaw_rate_cmd(45.0, None, DT) == pytest.approx(0.6 * 45.0)
    assert yaw_rate_cmd(315.0, None, DT) == pytest.approx(-0.6 * 45.0)


def test_derivative_term():
    # error grew from 40 to 45 deg in one tick
    u = yaw_rate_cmd(45.0, 40.0, DT, PdGains(0.6, 0.08))
    assert u == pytest.approx(0.6 * 45.0 + 0.08 * 5.0 / DT)


def test_derivative_uses_shortest_arc():
    # error crossing the +-180 seam is a small change, not a 358 deg jump
    u = yaw_rate_cmd(181.0, 179.0, DT, PdGains(0.1, 0.08))
    assert u == pytest.approx(0.1 * -179.0 + 0.08 * 2.0 / DT)


def test_tie_at_180_turns_ccw():
    assert yaw_rate_cmd(180.0, None, DT) == pytest.approx(100.0)


@given(st.floats(0, 360), st.one_of(st.none(), st.floats(-180, 180)))
def test_output_clamped(theta, prev):
    assert -100.0 <= yaw_rate_cmd(theta, prev, DT) <= 100.0


def test_validation():
    with pytest.raises(InvalidArgumentError):
        yaw_rate_cmd(10.0, None, 0.0)
    with pytest.raises(InvalidArgumentError):
        PdGains(kp=0.0).validate()
    with pytest.raises(InvalidArgumentError):
        ReorientMonitor(tolerance=0.0).validate()


def test_reorient_done_examples():
    m = ReorientMonitor(10.0, 1.0)
    inside = [(k * DT, 5.0) for k in range(41)]  # exactly 1.0 s
    assert reorient_done(inside, m)
    assert not reorient_done(inside[:-1], m)
    assert not reorient_done(inside[:-1] + [(1.0, 12.0)], m)
    assert not reorient_done([], m)


@given(st.lists(st.floats(-30, 30), min_size=1, max_size=120))
def test_tracker_matches_pure_function(errors):
    m = ReorientMonitor()
    tr = ReorientTracker(m)
    hist = []
    for k, e in enumerate(errors):
        hist.append((k * DT, e))
        assert tr.update(k * DT, e) == reorient_done(hist, m)


def test_tracker_none_resets():
    tr = ReorientTracker(ReorientMonitor(10.0, 0.05))
    tr.update(0.0, 1.0)
    tr.update(0.025, None)
    assert not tr.update(0.05, 1.0)
    assert tr.update(0.1, 1.0)


def test_pd_examples():
    assert yaw_rate_cmd(90.0, 90.0, DT) == pytest.approx(54.0)
    assert yaw_rate_cmd(0.0, 0.0, DT) == 0.0
    assert yaw_rate_cmd(350.0, -10.0, DT) == pytest.approx(-6.0)


@given(st.floats(0, 360), st.integers(-5, 5))
def test_wrap_invariance(theta, k):
    assert yaw_rate_cmd(theta + 360.0 * k, None, DT) == pytest.approx(yaw_rate_cmd(theta, None, DT), abs=1e-9)


@given(st.floats(-179.9, 179.9))
def test_symmetry_without_derivative(theta):
    assert yaw_rate_cmd(-theta, None, DT) == pytest.approx(-yaw_rate_cmd(theta, None, DT), abs=1e-9)


def test_reorient_done_cases():
    m = ReorientMonitor()
    assert reorient_done([(k * DT, 0.0) for k in range(81)], m)
    assert reorient_done([(k * DT, 9.0) for k in range(41)], m)
    assert not reorient_done([(k * DT, 30.0 if k % 2 else -30.0) for k in range(200)], m)


@pytest.mark.parametrize("e0", [180.0, 90.0, 45.0])
def test_closed_loop_monotone_and_settles(e0):
    import dataclasses
    from flowseek.config import ReorientParams, ScenarioConfig
    from flowseek.scenarios import cmd_reorient

    cfg = ScenarioConfig().with_overrides(noise=0.0)
    cfg = dataclasses.replace(cfg, reorient=ReorientParams(distances=(3.0,), initial_errors=(e0,)))
    cell = cmd_reorient(cfg).cells[0]
    after = [abs(e) for t, e in zip(cell.times, cell.errors) if t >= 1.0]
    assert all(b <= a + 1e-9 for a, b in zip(after, after[1:]))
    assert cell.settle_time is not None and cell.settle_time < 10.0
