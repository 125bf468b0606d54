"""Synthetic whisker flow sensor.

The fin deflects in the direction the apparent wind travels, expressed in
the body frame. Deflection magnitude follows ``gain_c * speed**exponent_p``
up to a saturation level. Gaussian noise and a constant manufacturing
offset are added per channel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError
from .flow_pipeline import FlowSample
from .geometry import Vec2, world_to_body

# The 4.6 mT detection threshold is 120% of the magnitude seen while casting
# at 0.2 m/s in still air; the default gain is solved from that constraint.
CAST_REFERENCE_SPEED = 0.2
CAST_REFERENCE_MAGNITUDE = 4.6 / 1.2


def calibrated_gain(exponent_p: float) -> float:
    return CAST_REFERENCE_MAGNITUDE / CAST_REFERENCE_SPEED**exponent_p


@dataclass(frozen=True)
class SensorParams:
    exponent_p: float = 2.0
    gain_c: float = field(default=None)  # type: ignore[assignment]
    saturation: float = 250.0
    noise_sigma: float = 0.5
    sample_rate: float = 40.0
    offset_x: float = 1.5
    offset_y: float = -0.8

    def __post_init__(self):
        if self.gain_c is None:
            object.__setattr__(self, "gain_c", calibrated_gain(self.exponent_p))
        self.validate()

    def validate(self) -> None:
        if not self.gain_c > 0:
            raise InvalidArgumentError("sensor.gain_c must be > 0")
        if not self.exponent_p > 0:
            raise InvalidArgumentError("sensor.exponent_p must be > 0")
        if not self.saturation > 0:
            raise InvalidArgumentError("sensor.saturation must be > 0")
        if not self.noise_sigma >= 0:
            raise InvalidArgumentError("sensor.noise_sigma must be >= 0")
        if not self.sample_rate > 0:
            raise InvalidArgumentError("sensor.sample_rate must be > 0")
        if not (math.isfinite(self.offset_x) and math.isfinite(self.offset_y)):
            raise InvalidArgumentError("sensor.offset_x/offset_y must be finite")

    @property
    def dt(self) -> float:
        return 1.0 / self.sample_rate


def apparent_wind(w_ambient: Vec2, v_quad: Vec2) -> Vec2:
    return w_ambient - v_quad


def magnitude_response(speed: float, params: SensorParams) -> float:
    if not speed >= 0:
        raise InvalidArgumentError(f"speed must be >= 0, got {speed}")
    return min(params.gain_c * speed**params.exponent_p, params.saturation)


def deflection(w_ambient: Vec2, vel: Vec2, yaw: float, params: SensorParams) -> Vec2:
    """Noise-free body-frame deflection (mT) for a vehicle moving at ``vel``."""
    a = world_to_body(apparent_wind(w_ambient, vel), yaw)
    speed = a.norm()
    if speed == 0.0:
        return Vec2(0.0, 0.0)
    return a * (magnitude_response(speed, params) / speed)


def sample(w_ambient: Vec2, quad, params: SensorParams, rng: np.random.Generator | None) -> FlowSample:
    """One raw sensor reading for ``quad`` (a ``QuadState``)."""
    d = deflection(w_ambient, quad.vel, quad.yaw, params)
    bx = d.x + params.offset_x
    by = d.y + params.offset_y
    if params.noise_sigma > 0:
        if rng is None:
            raise InvalidArgumentError("a random generator is required when noise_sigma > 0")
        nx, ny = rng.normal(0.0, params.noise_sigma, 2)
        bx += float(nx)
        by += float(ny)
    return FlowSample(quad.t, bx, by)
