"""Planar kinematic quadrotor.

Velocity relaxes with a first-order lag toward the commanded body velocity
(rotated into the world) plus a fraction of the ambient wind. Yaw follows
the commanded rate directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidArgumentError
from .geometry import ZERO, Vec2, body_to_world, world_to_body, wrap360

MAX_SPEED = 0.2  # m/s per body axis
MAX_YAW_RATE = 100.0  # deg/s


def clamp(v: float, lo: float, hi: float) -> float:
    return lo if v < lo else hi if v > hi else v


@dataclass(frozen=True, slots=True)
class QuadState:
    pos: Vec2 = ZERO
    yaw: float = 0.0
    vel: Vec2 = ZERO
    t: float = 0.0


@dataclass(frozen=True, slots=True)
class Command:
    v_body: Vec2 = ZERO
    yaw_rate: float = 0.0

    def __post_init__(self):
        if not (self.v_body.is_finite() and math.isfinite(self.yaw_rate)):
            raise InvalidArgumentError("command fields must be finite")
        object.__setattr__(
            self,
            "v_body",
            Vec2(clamp(self.v_body.x, -MAX_SPEED, MAX_SPEED), clamp(self.v_body.y, -MAX_SPEED, MAX_SPEED)),
        )
        object.__setattr__(self, "yaw_rate", clamp(self.yaw_rate, -MAX_YAW_RATE, MAX_YAW_RATE))


HOVER = Command()


@dataclass(frozen=True)
class VehicleParams:
    tau: float = 0.5  # s, velocity lag
    drift_gain: float = 0.1  # fraction of ambient wind felt as drift

    def validate(self) -> None:
        if not self.tau > 0:
            raise InvalidArgumentError("vehicle.tau must be > 0")
        if not self.drift_gain >= 0:
            raise InvalidArgumentError("vehicle.drift_gain must be >= 0")


def step(state: QuadState, cmd: Command, wind: Vec2, dt: float, params: VehicleParams = VehicleParams()) -> QuadState:
    if not (math.isfinite(dt) and 0 < dt <= 0.1):
        raise InvalidArgumentError(f"dt must be in (0, 0.1], got {dt}")
    if not (state.pos.is_finite() and state.vel.is_finite() and math.isfinite(state.yaw) and wind.is_finite()):
        raise InvalidArgumentError("non-finite vehicle state or wind")
    target = body_to_world(cmd.v_body, state.yaw) + wind * params.drift_gain
    alpha = 1.0 - math.exp(-dt / params.tau)
    vel = state.vel + (target - state.vel) * alpha
    pos = state.pos + vel * dt
    yaw = wrap360(state.yaw + cmd.yaw_rate * dt)
    return QuadState(pos, yaw, vel, state.t + dt)


def hold_position(state: QuadState, target: Vec2, gain: float = 0.5) -> Vec2:
    """Body-frame velocity command for a proportional station-keeping loop."""
    return world_to_body((target - state.pos) * gain, state.yaw)
