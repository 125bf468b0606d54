import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import circ_diff
from flowseek.errors import CalibrationError, InvalidArgumentError, UndefinedBearingError
from flowseek.flow_pipeline import (
    CalibrationBias, FlowPipeline, FlowSample, MovingAverage, calibrate, check_stream,
    estimate, filter_step, flow_angle, flow_magnitude,
)
from flowseek.geometry import Vec2, rotate

finite = st.floats(-1e3, 1e3, allow_nan=False)
nonzero_vec = st.tuples(finite, finite).filter(lambda v: math.hypot(*v) > 1e-6)

ZERO_BIAS = CalibrationBias(0.0, 0.0, 1)


# calibrate

def test_calibrate_constant_stream():
    b = calibrate([FlowSample(i * 0.025, 1.2, -0.4) for i in range(80)])
    assert (b.bias_x, b.bias_y, b.sample_count) == (pytest.approx(1.2), pytest.approx(-0.4), 80)
    assert b.valid


def test_calibrate_two_point_mean():
    b = calibrate([FlowSample(0.0, 1.0, 0.0), FlowSample(0.025, 3.0, 0.0)])
    assert (b.bias_x, b.bias_y) == (2.0, 0.0)


def test_calibrate_empty():
    with pytest.raises(CalibrationError):
        calibrate([])


def test_input_equal_to_bias_maps_to_zero():
    b = calibrate([FlowSample(0.0, 1.0, 2.0), FlowSample(0.025, 3.0, -2.0)])
    out = filter_step(MovingAverage(10), FlowSample(0.05, b.bias_x, b.bias_y), b)
    assert out == Vec2(0.0, 0.0)


def test_invalid_bias_rejected():
    with pytest.raises(CalibrationError):
        filter_step(MovingAverage(), FlowSample(0, 1, 1), CalibrationBias(0, 0, 0))


# moving average

def test_constant_input_after_full_window():
    f = MovingAverage(10)
    for _ in range(15):
        out = filter_step(f, FlowSample(0, 7.5, -2.0), ZERO_BIAS)
    assert out == Vec2(7.5, -2.0)


def test_ten_zeros_then_five_tens():
    f = MovingAverage(10)
    for _ in range(10):
        f.push(0.0, 0.0)
    for _ in range(5):
        out = f.push(10.0, 0.0)
    history = [0.0] * 10 + [10.0] * 5
    assert out.x == sum(history[-10:]) / 10 == 5.0


def test_partial_window_mean():
    f = MovingAverage(10)
    f.push(2.0, 0.0)
    assert f.push(4.0, 0.0).x == 3.0


def test_window_validation_and_reset():
    with pytest.raises(InvalidArgumentError):
        MovingAverage(0)
    f = MovingAverage(3)
    f.push(1.0, 1.0)
    f.reset()
    assert len(f) == 0
    assert f.push(5.0, 5.0) == Vec2(5.0, 5.0)


@given(st.integers(1, 20), st.lists(finite, min_size=1, max_size=60))
def test_filter_matches_direct_mean(window, xs):
    f = MovingAverage(window)
    for n, x in enumerate(xs, start=1):
        out = f.push(x, -x)
        tail = xs[max(0, n - window):n]
        assert out.x == pytest.approx(math.fsum(tail) / len(tail), abs=1e-9)
        assert out.y == pytest.approx(-math.fsum(tail) / len(tail), abs=1e-9)


# flow angle and magnitude

@pytest.mark.parametrize("v, theta", [((1, 0), 180.0), ((1, 1), 225.0), ((-2, 0), 0.0), ((0, 1), 270.0), ((0, -1), 90.0)])
def test_flow_angle_examples(v, theta):
    assert flow_angle(Vec2(*v)) == pytest.approx(theta)


def test_flow_angle_zero_vector():
    with pytest.raises(UndefinedBearingError):
        flow_angle(Vec2(0.0, 0.0))


@pytest.mark.parametrize("v, m", [((3, 4), 5.0), ((0, 0), 0.0), ((-1, 0), 1.0)])
def test_flow_magnitude_examples(v, m):
    assert flow_magnitude(Vec2(*v)) == m


@given(nonzero_vec, st.floats(-720, 720))
def test_flow_angle_rotation_equivariance(v, phi):
    a = flow_angle(rotate(Vec2(*v), phi))
    b = (flow_angle(Vec2(*v)) + phi) % 360.0
    assert circ_diff(a, b) < 1e-9


@given(nonzero_vec, st.floats(-720, 720), st.floats(-100, 100))
def test_magnitude_rotation_invariant_and_homogeneous(v, phi, k):
    vv = Vec2(*v)
    m = flow_magnitude(vv)
    assert flow_magnitude(rotate(vv, phi)) == pytest.approx(m, rel=1e-12, abs=1e-12)
    assert flow_magnitude(vv * k) == pytest.approx(abs(k) * m, rel=1e-12, abs=1e-12)


@given(nonzero_vec)
def test_flow_angle_in_range(v):
    assert 0.0 <= flow_angle(Vec2(*v)) < 360.0


# estimate

@given(st.floats(0, 360))
def test_detection_above_threshold_any_bearing(phi):
    a = math.radians(phi)
    est = estimate(MovingAverage(1), FlowSample(0, 4.7 * math.cos(a), 4.7 * math.sin(a)), ZERO_BIAS, 4.6)
    assert est.detected and est.theta is not None


def test_below_threshold_still_has_bearing():
    est = estimate(MovingAverage(1), FlowSample(0, 4.5, 0.0), ZERO_BIAS, 4.6)
    assert not est.detected
    assert est.theta == pytest.approx(180.0)
    assert est.magnitude == pytest.approx(4.5)


def test_zero_filtered_has_no_bearing():
    est = estimate(MovingAverage(1), FlowSample(0, 0.0, 0.0), ZERO_BIAS, 4.6)
    assert (est.theta, est.magnitude, est.detected) == (None, 0.0, False)


def test_estimate_threshold_must_be_positive():
    with pytest.raises(InvalidArgumentError):
        estimate(MovingAverage(1), FlowSample(0, 1.0, 0.0), ZERO_BIAS, 0.0)


def test_pipeline_requires_calibration():
    p = FlowPipeline()
    with pytest.raises(CalibrationError):
        p.update(FlowSample(0, 1, 1))
    p.calibrate([FlowSample(0, 1.0, 1.0)])
    est = p.update(FlowSample(0.025, 6.0, 1.0))
    assert est.magnitude == pytest.approx(5.0) and est.detected


def test_check_stream():
    check_stream([FlowSample(0.0, 1, 1), FlowSample(0.1, 1, 1)])
    with pytest.raises(InvalidArgumentError):
        check_stream([FlowSample(0.1, 1, 1), FlowSample(0.1, 1, 1)])
    with pytest.raises(InvalidArgumentError):
        check_stream([FlowSample(0.0, math.nan, 1)])
