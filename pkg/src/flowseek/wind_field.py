"""Steady planar fan plume anchored to four anemometer readings.

Airflow spreads radially from the fan centre inside a Gaussian cone around
the fan axis. Speed along a ray follows a piecewise log-linear profile
through the anchor table: constant inside the first anchor, and beyond the
last anchor the final log-slope continues under a linear taper that reaches
zero at ``cutoff_distance``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Tuple

from .errors import InvalidArgumentError, UndefinedBearingError
from .geometry import ZERO, Vec2, bearing, unit, wrap360

DEFAULT_ANCHORS: Tuple[Tuple[float, float], ...] = (
    (1.5, 1.24),
    (3.0, 0.80),
    (4.5, 0.40),
    (6.0, 0.20),
)


@dataclass(frozen=True)
class FanPlume:
    origin: Vec2 = Vec2(0.0, 0.0)
    heading: float = 0.0
    anchors: Tuple[Tuple[float, float], ...] = DEFAULT_ANCHORS
    half_width_deg: float = 15.0
    cutoff_distance: float = 9.0
    _axis: Vec2 = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self.validate()
        object.__setattr__(self, "anchors", tuple((float(d), float(s)) for d, s in self.anchors))
        object.__setattr__(self, "heading", wrap360(self.heading))
        object.__setattr__(self, "_axis", unit(self.heading))

    def validate(self) -> None:
        if len(self.anchors) < 1:
            raise InvalidArgumentError("fan.anchors needs at least one (distance, speed) pair")
        prev_d, prev_s = 0.0, math.inf
        for d, s in self.anchors:
            if not (d > prev_d and 0 < s < prev_s):
                raise InvalidArgumentError(
                    "fan.anchors must have increasing distance and strictly decreasing positive speed"
                )
            prev_d, prev_s = d, s
        if not 0 < self.half_width_deg < 90:
            raise InvalidArgumentError("fan.half_width_deg must be in (0, 90)")
        if not self.cutoff_distance > self.anchors[-1][0]:
            raise InvalidArgumentError("fan.cutoff_distance must exceed the last anchor distance")

    @property
    def axis(self) -> Vec2:
        return self._axis

    def axial_speed(self, d: float) -> float:
        """Speed along the axis at distance ``d`` from the fan (m/s)."""
        a = self.anchors
        if d <= a[0][0]:
            return a[0][1]
        if d >= self.cutoff_distance:
            return 0.0
        for (d0, s0), (d1, s1) in zip(a, a[1:]):
            if d <= d1:
                u = (d - d0) / (d1 - d0)
                return math.exp((1.0 - u) * math.log(s0) + u * math.log(s1))
        dn, sn = a[-1]
        if len(a) >= 2:
            dp, sp = a[-2]
            rate = math.log(sp / sn) / (dn - dp)
        else:
            rate = 0.0
        taper = (self.cutoff_distance - d) / (self.cutoff_distance - dn)
        return sn * math.exp(-rate * (d - dn)) * taper

    def cross_factor(self, off_axis_deg: float) -> float:
        return math.exp(-0.5 * (off_axis_deg / self.half_width_deg) ** 2)

    def off_axis_angle(self, p: Vec2) -> float:
        r = p - self.origin
        return math.degrees(math.atan2(abs(self._axis.cross(r)), self._axis.dot(r)))


def wind_at(field: FanPlume, p: Vec2) -> Vec2:
    """World-frame wind velocity at ``p`` (m/s); zero at or behind the fan plane."""
    r = p - field.origin
    along = field.axis.dot(r)
    if along <= 0.0:
        return ZERO
    d = r.norm()
    speed = field.axial_speed(d)
    if speed == 0.0:
        return ZERO
    off = math.degrees(math.atan2(abs(field.axis.cross(r)), along))
    speed *= field.cross_factor(off)
    return Vec2(r.x / d, r.y / d) * speed


def upwind_bearing_at(field: FanPlume, p: Vec2) -> float:
    """World bearing from ``p`` back toward the fan, against the local wind."""
    w = wind_at(field, p)
    if w.x == 0.0 and w.y == 0.0:
        raise UndefinedBearingError(f"no wind at ({p.x}, {p.y})")
    return bearing(-w)


def distance_to_fan(field: FanPlume, p: Vec2) -> float:
    return (p - field.origin).norm()
