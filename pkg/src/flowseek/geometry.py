"""Angle and frame conventions.

World frame is right-handed with z up. Yaw 0 points along world +X and
positive yaw turns counter-clockwise when viewed from above. The body frame
has +X at the vehicle front and +Y to the left. All public angles are in
degrees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidArgumentError, UndefinedBearingError


def _check_finite(*values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise InvalidArgumentError(f"expected a finite value, got {v!r}")


def wrap360(a: float) -> float:
    """Wrap ``a`` degrees into ``[0, 360)``."""
    _check_finite(a)
    r = math.fmod(a, 360.0)
    if r < 0.0:
        r += 360.0
    # fmod of a tiny negative number can round up to exactly 360
    if r >= 360.0:
        r = 0.0
    return r + 0.0


def wrap180(a: float) -> float:
    """Wrap ``a`` degrees into ``(-180, 180]``."""
    r = wrap360(a)
    if r > 180.0:
        r -= 360.0
    return r


@dataclass(frozen=True, slots=True)
class Vec2:
    x: float
    y: float

    def __add__(self, other: Vec2) -> Vec2:
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: Vec2) -> Vec2:
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, k: float) -> Vec2:
        return Vec2(self.x * k, self.y * k)

    __rmul__ = __mul__

    def __neg__(self) -> Vec2:
        return Vec2(-self.x, -self.y)

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def dot(self, other: Vec2) -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: Vec2) -> float:
        return self.x * other.y - self.y * other.x

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y)


ZERO = Vec2(0.0, 0.0)


def rotate(v: Vec2, angle_deg: float) -> Vec2:
    """Rotate ``v`` counter-clockwise by ``angle_deg``."""
    _check_finite(v.x, v.y, angle_deg)
    a = math.radians(angle_deg)
    c, s = math.cos(a), math.sin(a)
    return Vec2(c * v.x - s * v.y, s * v.x + c * v.y)


def world_to_body(v_world: Vec2, yaw: float) -> Vec2:
    """Express a world-frame vector in the body frame of a vehicle at ``yaw``."""
    return rotate(v_world, -yaw)


def body_to_world(v_body: Vec2, yaw: float) -> Vec2:
    return rotate(v_body, yaw)


def bearing(v: Vec2) -> float:
    """Direction of ``v`` in degrees, in ``[0, 360)``."""
    _check_finite(v.x, v.y)
    if v.x == 0.0 and v.y == 0.0:
        raise UndefinedBearingError("bearing of a zero vector is undefined")
    return wrap360(math.degrees(math.atan2(v.y, v.x)))


def unit(angle_deg: float) -> Vec2:
    a = math.radians(angle_deg)
    return Vec2(math.cos(a), math.sin(a))
