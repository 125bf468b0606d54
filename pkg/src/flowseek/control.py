"""PD yaw servoing on the measured flow-source bearing."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from .errors import InvalidArgumentError
from .geometry import wrap180
from .vehicle import MAX_YAW_RATE, clamp


@dataclass(frozen=True)
class PdGains:
    kp: float = 0.6
    kd: float = 0.08

    def validate(self) -> None:
        if not self.kp > 0:
            raise InvalidArgumentError("control.kp must be > 0")
        if not self.kd >= 0:
            raise InvalidArgumentError("control.kd must be >= 0")


@dataclass(frozen=True)
class ReorientMonitor:
    tolerance: float = 10.0  # deg
    hold_time: float = 1.0  # s

    def validate(self) -> None:
        if not self.tolerance > 0:
            raise InvalidArgumentError("control.tolerance must be > 0")
        if not self.hold_time >= 0:
            raise InvalidArgumentError("control.hold_time must be >= 0")


def heading_error(theta: float) -> float:
    """Signed error in (-180, 180]; zero when the source is dead ahead.

    Exactly 180 maps to +180, so a source directly behind turns the vehicle
    counter-clockwise.
    """
    return wrap180(theta)


def yaw_rate_cmd(theta: float, prev_error: Optional[float], dt: float, gains: PdGains = PdGains()) -> float:
    if not dt > 0:
        raise InvalidArgumentError(f"dt must be > 0, got {dt}")
    e = heading_error(theta)
    de = 0.0 if prev_error is None else wrap180(e - prev_error) / dt
    return clamp(gains.kp * e + gains.kd * de, -MAX_YAW_RATE, MAX_YAW_RATE)


def reorient_done(history: Sequence[Tuple[float, float]], monitor: ReorientMonitor = ReorientMonitor()) -> bool:
    """True iff |error| stayed within tolerance over the trailing ``hold_time``.

    ``history`` is a sequence of ``(t, error_deg)`` pairs in time order.
    """
    if not history:
        return False
    t_end = history[-1][0]
    for t, e in reversed(history):
        if abs(e) > monitor.tolerance:
            return False
        if t_end - t >= monitor.hold_time - 1e-9:
            return True
    return False


class ReorientTracker:
    """Streaming equivalent of :func:`reorient_done`."""

    def __init__(self, monitor: ReorientMonitor = ReorientMonitor()):
        self.monitor = monitor
        self._since: Optional[float] = None

    def reset(self) -> None:
        self._since = None

    def update(self, t: float, error: Optional[float]) -> bool:
        if error is None or abs(error) > self.monitor.tolerance:
            self._since = None
            return False
        if self._since is None:
            self._since = t
        return t - self._since >= self.monitor.hold_time - 1e-9
