"""Vector Surge: cast until flow is found, turn into it, surge upwind.

Phases run Calibrate -> Cast -> Reorient -> Surge -> Stopped, with Surge
falling back to Cast when the flow is lost. Casting repeats left, forward
and right legs in the body frame, each cycle longer than the last.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

import numpy as np

from .control import PdGains, ReorientMonitor, ReorientTracker, heading_error, yaw_rate_cmd
from .errors import ConfigError
from .flow_pipeline import FlowEstimate, FlowPipeline, PipelineParams
from .geometry import ZERO, Vec2
from .sensor_model import SensorParams, magnitude_response, sample
from .trial_log import Arena, TickRecord, TrialLog, summarize
from .vehicle import HOVER, Command, QuadState, VehicleParams, step
from .wind_field import FanPlume, wind_at

_EPS = 1e-9


class Phase(str, enum.Enum):
    CALIBRATE = "Calibrate"
    CAST = "Cast"
    REORIENT = "Reorient"
    SURGE = "Surge"
    STOPPED = "Stopped"


class CastLeg(str, enum.Enum):
    LEFT = "Left"
    FORWARD = "Forward"
    RIGHT = "Right"


_NEXT_LEG = {CastLeg.LEFT: CastLeg.FORWARD, CastLeg.FORWARD: CastLeg.RIGHT, CastLeg.RIGHT: CastLeg.LEFT}
_LEG_DIRECTION = {CastLeg.LEFT: Vec2(0.0, 1.0), CastLeg.FORWARD: Vec2(1.0, 0.0), CastLeg.RIGHT: Vec2(0.0, -1.0)}


@dataclass(frozen=True)
class FsmState:
    phase: Phase = Phase.CALIBRATE
    cast_cycle: int = 0
    cast_leg: CastLeg = CastLeg.LEFT
    leg_elapsed: float = 0.0
    loss_elapsed: float = 0.0
    phase_elapsed: float = 0.0
    prev_error: Optional[float] = None
    surge_peak: float = 0.0
    plateau_elapsed: float = 0.0


@dataclass(frozen=True)
class SurgeParams:
    """Thresholds (mT), timers (s) and speeds (m/s) for the state machine.

    ``stop_threshold`` and ``loss_threshold`` default to values derived from
    the sensor law and detection threshold; see :meth:`resolved`.
    Above ``stop_threshold`` the surge stops once the magnitude maximum has
    been reached: either it has not grown by more than ``plateau_tol`` for
    ``plateau_hold`` seconds, or it has fallen ``peak_drop`` below the surge
    peak. A ``plateau_hold`` of zero reduces the rule to the bare threshold.
    """

    detect_threshold: float = 4.6
    stop_threshold: Optional[float] = None
    loss_threshold: Optional[float] = None
    loss_hold: float = 1.5
    reorient_floor: Optional[float] = None
    cast_base: float = 2.0
    cast_increment: float = 1.0
    cast_speed: float = 0.2
    surge_speed: float = 0.2
    calibrate_time: float = 2.0
    plateau_hold: float = 2.0
    plateau_tol: float = 0.05
    peak_drop: float = 0.15  # fractional fall from the surge peak that also counts as the maximum
    stop_reference_speed: float = 0.3  # m/s of apparent wind giving the default stop threshold
    gains: PdGains = field(default_factory=PdGains)

    def resolved(self, sensor: SensorParams) -> SurgeParams:
        stop = self.stop_threshold
        if stop is None:
            stop = magnitude_response(self.stop_reference_speed, sensor)
        loss = self.loss_threshold if self.loss_threshold is not None else 0.9 * self.detect_threshold
        floor = self.reorient_floor if self.reorient_floor is not None else 0.5 * self.detect_threshold
        return replace(self, stop_threshold=stop, loss_threshold=loss, reorient_floor=floor)

    def validate(self) -> None:
        if self.stop_threshold is None or self.loss_threshold is None or self.reorient_floor is None:
            raise ConfigError("surge parameters must be resolved before use")
        if not self.stop_threshold > self.detect_threshold > self.loss_threshold > 0:
            raise ConfigError(
                "surge thresholds must satisfy stop_threshold > detect_threshold > loss_threshold > 0 "
                f"(got {self.stop_threshold}, {self.detect_threshold}, {self.loss_threshold})"
            )
        if not 0 <= self.reorient_floor <= self.detect_threshold:
            raise ConfigError("surge.reorient_floor must be in [0, detect_threshold]")
        for name in ("loss_hold", "cast_increment", "plateau_hold"):
            if not getattr(self, name) >= 0:
                raise ConfigError(f"surge.{name} must be >= 0")
        for name in ("cast_base", "cast_speed", "surge_speed", "calibrate_time"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"surge.{name} must be > 0")
        if not 0 <= self.plateau_tol < 1:
            raise ConfigError("surge.plateau_tol must be in [0, 1)")
        if not 0 <= self.peak_drop < 1:
            raise ConfigError("surge.peak_drop must be in [0, 1)")
        self.gains.validate()


def leg_duration(cycle: int, params: SurgeParams) -> float:
    return params.cast_base + cycle * params.cast_increment


def _cast_command(leg: CastLeg, params: SurgeParams) -> Command:
    return Command(_LEG_DIRECTION[leg] * params.cast_speed, 0.0)


def _servo(state: FsmState, est: FlowEstimate, dt: float, params: SurgeParams) -> Tuple[float, Optional[float]]:
    if est.theta is None:
        return 0.0, state.prev_error
    return yaw_rate_cmd(est.theta, state.prev_error, dt, params.gains), heading_error(est.theta)


def _enter(phase: Phase, **kw) -> FsmState:
    return FsmState(phase=phase, **kw)


def transition(
    state: FsmState,
    est: FlowEstimate,
    reorient_flag: bool,
    dt: float,
    params: SurgeParams,
) -> Tuple[FsmState, Command]:
    """Advance the state machine by one tick and return the command to fly."""
    ph = state.phase

    if ph is Phase.STOPPED:
        return replace(state, phase_elapsed=state.phase_elapsed + dt), HOVER

    if ph is Phase.CALIBRATE:
        elapsed = state.phase_elapsed + dt
        if elapsed >= params.calibrate_time - _EPS:
            return _enter(Phase.CAST), _cast_command(CastLeg.LEFT, params)
        return replace(state, phase_elapsed=elapsed), HOVER

    if ph is Phase.CAST:
        if est.magnitude >= params.detect_threshold:
            nxt = _enter(Phase.REORIENT, cast_cycle=state.cast_cycle)
            rate, err = _servo(nxt, est, dt, params)
            return replace(nxt, prev_error=err), Command(ZERO, rate)
        leg, cycle = state.cast_leg, state.cast_cycle
        elapsed = state.leg_elapsed + dt
        if elapsed >= leg_duration(cycle, params) - _EPS:
            if leg is CastLeg.RIGHT:
                cycle += 1
            leg = _NEXT_LEG[leg]
            elapsed = 0.0
        nxt = replace(state, cast_leg=leg, cast_cycle=cycle, leg_elapsed=elapsed,
                      phase_elapsed=state.phase_elapsed + dt)
        return nxt, _cast_command(leg, params)

    if ph is Phase.REORIENT:
        if reorient_flag:
            nxt = _enter(Phase.SURGE, prev_error=state.prev_error, surge_peak=est.magnitude)
            rate, err = _servo(nxt, est, dt, params)
            return replace(nxt, prev_error=err), Command(Vec2(params.surge_speed, 0.0), rate)
        # weak edge detections leave the bearing buried in noise; give up and cast again
        weak = est.magnitude < params.reorient_floor
        loss = state.loss_elapsed + dt if weak else 0.0
        if weak and loss >= params.loss_hold - _EPS:
            return _enter(Phase.CAST), _cast_command(CastLeg.LEFT, params)
        rate, err = _servo(state, est, dt, params)
        nxt = replace(state, prev_error=err, loss_elapsed=loss, phase_elapsed=state.phase_elapsed + dt)
        return nxt, Command(ZERO, rate)

    # Surge
    m = est.magnitude
    peak, plateau = state.surge_peak, state.plateau_elapsed + dt
    if m > peak * (1.0 + params.plateau_tol):
        peak, plateau = m, 0.0
    at_plateau = params.plateau_hold <= 0 or (
        plateau >= params.plateau_hold - _EPS and m >= peak * (1.0 - params.plateau_tol)
    )
    past_peak = params.peak_drop > 0 and m < peak * (1.0 - params.peak_drop)
    if m >= params.stop_threshold and (at_plateau or past_peak):
        return _enter(Phase.STOPPED), HOVER
    loss = state.loss_elapsed + dt if m < params.loss_threshold else 0.0
    if m < params.loss_threshold and loss >= params.loss_hold - _EPS:
        return _enter(Phase.CAST), _cast_command(CastLeg.LEFT, params)
    rate, err = _servo(state, est, dt, params)
    nxt = replace(state, loss_elapsed=loss, surge_peak=peak, plateau_elapsed=plateau,
                  prev_error=err, phase_elapsed=state.phase_elapsed + dt)
    return nxt, Command(Vec2(params.surge_speed, 0.0), rate)


@dataclass(frozen=True)
class TrialParams:
    """Everything a closed-loop trial needs besides the start pose and seed."""

    sensor: SensorParams = field(default_factory=SensorParams)
    vehicle: VehicleParams = field(default_factory=VehicleParams)
    pipeline: PipelineParams = field(default_factory=PipelineParams)
    surge: SurgeParams = field(default_factory=SurgeParams)
    monitor: ReorientMonitor = field(default_factory=ReorientMonitor)
    arena: Arena = field(default_factory=Arena)
    time_limit: float = 120.0
    success_radius: float = 1.5

    def resolved(self) -> TrialParams:
        surge = replace(self.surge, calibrate_time=self.pipeline.calibration_time).resolved(self.sensor)
        return replace(self, surge=surge)

    def validate(self) -> None:
        self.sensor.validate()
        self.vehicle.validate()
        self.pipeline.validate()
        self.surge.validate()
        self.monitor.validate()
        if not (self.arena.width > 0 and self.arena.height > 0):
            raise ConfigError("arena.width and arena.height must be > 0")
        if not self.time_limit > 0:
            raise ConfigError("trial.time_limit must be > 0")
        if not self.success_radius > 0:
            raise ConfigError("trial.success_radius must be > 0")
        if 1.0 / self.sensor.sample_rate > 0.1:
            raise ConfigError("sensor.sample_rate must be >= 10 Hz")


NO_FLOW = FlowEstimate(None, 0.0, False)


def run_trial(
    initial: QuadState,
    fan: FanPlume,
    params: TrialParams = TrialParams(),
    seed=0,
) -> TrialLog:
    """Closed-loop Vector Surge run at the sensor rate.

    The fan is off while calibrating and on afterwards. The run ends when the
    vehicle stops, leaves the arena, or hits the time limit.
    """
    params = params.resolved()
    params.validate()
    if not params.arena.contains(initial.pos.x, initial.pos.y):
        raise ConfigError(f"start position ({initial.pos.x}, {initial.pos.y}) is outside the arena")

    rng = np.random.default_rng(seed)
    rate = params.sensor.sample_rate
    dt = 1.0 / rate
    n_max = int(math.floor(params.time_limit * rate + _EPS))
    surge = params.surge

    pipeline = FlowPipeline(params.pipeline.window, surge.detect_threshold)
    tracker = ReorientTracker(params.monitor)
    calibration = []
    fsm = FsmState()
    flag = False
    state = replace(initial, t=0.0)
    ticks = []

    for k in range(n_max):
        state = replace(state, t=k / rate)
        fan_on = fsm.phase is not Phase.CALIBRATE
        w = wind_at(fan, state.pos) if fan_on else ZERO
        raw = sample(w, state, params.sensor, rng)
        if fsm.phase is Phase.CALIBRATE:
            calibration.append(raw)
            est = NO_FLOW
        else:
            est = pipeline.update(raw)

        nxt, cmd = transition(fsm, est, flag, dt, surge)
        if fsm.phase is Phase.CALIBRATE and nxt.phase is not Phase.CALIBRATE:
            pipeline.calibrate(calibration)
        if nxt.phase is Phase.REORIENT:
            if fsm.phase is not Phase.REORIENT:
                tracker.reset()
            flag = tracker.update(state.t, None if est.theta is None else heading_error(est.theta))
        else:
            flag = False

        ticks.append(
            TickRecord.quantised(
                state.t, state.pos.x, state.pos.y, state.yaw, raw.bx, raw.by,
                est.theta, None if fsm.phase is Phase.CALIBRATE else est.magnitude,
                est.detected, nxt.phase.value, cmd.v_body.x, cmd.v_body.y, cmd.yaw_rate,
            )
        )
        fsm = nxt
        if fsm.phase is Phase.STOPPED or not params.arena.contains(state.pos.x, state.pos.y):
            break
        state = step(state, cmd, w, dt, params.vehicle)

    summary = summarize(ticks, (fan.origin.x, fan.origin.y), params.arena, params.success_radius)
    return TrialLog(ticks, summary)
