"""Raw (Bx, By) samples to a calibrated, filtered flow estimate.

The sensor deflects downstream, so the bearing of the flow source in the
body frame is the deflection direction plus 180 degrees.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import CalibrationError, InvalidArgumentError, UndefinedBearingError
from .geometry import Vec2, wrap360

DEFAULT_WINDOW = 10
DEFAULT_THRESHOLD = 4.6  # mT


@dataclass(frozen=True, slots=True)
class FlowSample:
    t: float
    bx: float
    by: float


@dataclass(frozen=True, slots=True)
class CalibrationBias:
    bias_x: float
    bias_y: float
    sample_count: int

    @property
    def valid(self) -> bool:
        return self.sample_count >= 1


@dataclass(frozen=True, slots=True)
class FlowEstimate:
    theta: Optional[float]
    magnitude: float
    detected: bool
    deflection: Vec2 = Vec2(0.0, 0.0)


@dataclass(frozen=True, slots=True)
class PipelineParams:
    window: int = DEFAULT_WINDOW
    calibration_time: float = 2.0  # s of fan-off hover

    def validate(self) -> None:
        if self.window < 1:
            raise InvalidArgumentError("pipeline.window must be >= 1")
        if not self.calibration_time > 0:
            raise InvalidArgumentError("pipeline.calibration_time must be > 0")


class MovingAverage:
    """Trailing moving average over the last ``window`` values per channel.

    Before the buffer fills, the mean of the samples seen so far is returned.
    """

    def __init__(self, window: int = DEFAULT_WINDOW):
        if window < 1:
            raise InvalidArgumentError(f"window must be >= 1, got {window}")
        self.window = window
        self._x: deque[float] = deque(maxlen=window)
        self._y: deque[float] = deque(maxlen=window)

    def __len__(self) -> int:
        return len(self._x)

    def reset(self) -> None:
        self._x.clear()
        self._y.clear()

    def push(self, x: float, y: float) -> Vec2:
        self._x.append(x)
        self._y.append(y)
        n = len(self._x)
        return Vec2(math.fsum(self._x) / n, math.fsum(self._y) / n)


def calibrate(samples: Iterable[FlowSample]) -> CalibrationBias:
    """Per-channel mean of a fan-off hover window."""
    xs, ys = [], []
    for s in samples:
        xs.append(s.bx)
        ys.append(s.by)
    if not xs:
        raise CalibrationError("calibration needs at least one sample")
    n = len(xs)
    return CalibrationBias(math.fsum(xs) / n, math.fsum(ys) / n, n)


def filter_step(f: MovingAverage, raw: FlowSample, bias: CalibrationBias) -> Vec2:
    if not bias.valid:
        raise CalibrationError("calibration bias is not valid")
    return f.push(raw.bx - bias.bias_x, raw.by - bias.bias_y)


def flow_angle(deflection: Vec2) -> float:
    """Bearing of the flow source in the body frame, degrees in ``[0, 360)``."""
    if deflection.x == 0.0 and deflection.y == 0.0:
        raise UndefinedBearingError("flow bearing undefined for zero deflection")
    return wrap360(math.degrees(math.atan2(deflection.y, deflection.x)) + 180.0)


def flow_magnitude(deflection: Vec2) -> float:
    return math.hypot(deflection.x, deflection.y)


def estimate_from_deflection(deflection: Vec2, threshold: float) -> FlowEstimate:
    mag = flow_magnitude(deflection)
    theta = flow_angle(deflection) if mag > 0.0 else None
    return FlowEstimate(theta, mag, mag >= threshold, deflection)


def estimate(
    f: MovingAverage,
    raw: FlowSample,
    bias: CalibrationBias,
    threshold: float = DEFAULT_THRESHOLD,
) -> FlowEstimate:
    if not threshold > 0:
        raise InvalidArgumentError(f"threshold must be > 0, got {threshold}")
    return estimate_from_deflection(filter_step(f, raw, bias), threshold)


class FlowPipeline:
    """Stateful wrapper: calibrate once, then estimate sample by sample."""

    def __init__(self, window: int = DEFAULT_WINDOW, threshold: float = DEFAULT_THRESHOLD):
        self.filter = MovingAverage(window)
        self.threshold = threshold
        self.bias: Optional[CalibrationBias] = None

    def calibrate(self, samples: Sequence[FlowSample]) -> CalibrationBias:
        self.bias = calibrate(samples)
        self.filter.reset()
        return self.bias

    def update(self, raw: FlowSample) -> FlowEstimate:
        if self.bias is None:
            raise CalibrationError("pipeline used before calibration")
        return estimate(self.filter, raw, self.bias, self.threshold)


def check_stream(samples: Sequence[FlowSample]) -> None:
    """Raise if timestamps are not strictly increasing or values non-finite."""
    prev = -math.inf
    for i, s in enumerate(samples):
        if not (math.isfinite(s.t) and math.isfinite(s.bx) and math.isfinite(s.by)):
            raise InvalidArgumentError(f"sample {i} has non-finite fields")
        if s.t <= prev:
            raise InvalidArgumentError(
                f"sample {i}: timestamp {s.t} not after previous {prev}"
            )
        prev = s.t
