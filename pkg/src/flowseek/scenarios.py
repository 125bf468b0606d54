"""Scenario runners: characterization, reorientation, seeking, batch, replay."""

from __future__ import annotations

import csv
import math
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .config import ScenarioConfig
from .control import heading_error, yaw_rate_cmd
from .errors import ConfigError, InvalidArgumentError, ReplayParseError, ReplayValidationError
from .flow_pipeline import (
    FlowEstimate,
    FlowPipeline,
    FlowSample,
    CalibrationBias,
    check_stream,
    flow_angle,
)
from .geometry import ZERO, Vec2, wrap180, wrap360
from .sensor_model import sample
from .trial_log import (
    SUMMARY_COLUMNS,
    Outcome,
    TrialLog,
    fmt6,
    summary_row,
    write_table,
    write_ticks,
)
from .vector_surge import run_trial
from .vehicle import Command, QuadState, hold_position, step
from .wind_field import FanPlume, upwind_bearing_at, wind_at

_EPS = 1e-9
STREAM_COLUMNS = ("t_s", "bx_mT", "by_mT")


def _n(seconds: float, rate: float) -> int:
    return int(round(seconds * rate))


def _true_theta(fan: FanPlume, w: Vec2, st: QuadState) -> Optional[float]:
    """Body-frame bearing of the fan seen along the ambient wind, if any."""
    if w.x == 0.0 and w.y == 0.0:
        return None
    return wrap360(upwind_bearing_at(fan, st.pos) - st.yaw)


def _axis_point(fan: FanPlume, d: float) -> Vec2:
    return fan.origin + fan.axis * d


# ---- characterization ------------------------------------------------------

@dataclass(frozen=True)
class CharacterizeTick:
    t: float
    x: float
    y: float
    yaw: float
    true_theta: Optional[float]
    raw_theta: Optional[float]
    theta: Optional[float]
    mag: Optional[float]
    phase: str  # Calibrate, Wait or Rotate


@dataclass
class CharacterizeRun:
    distance: float
    speed: float  # on-axis wind speed at the station, m/s
    ticks: List[CharacterizeTick]
    samples: List[FlowSample]
    estimates: List[FlowEstimate]  # one per post-calibration sample
    rms_error: float  # vs. window-averaged true bearing; nan when undefined
    rms_error_instant: float  # vs. instantaneous true bearing
    max_magnitude: float


CHARACTERIZE_COLUMNS = (
    "t_s", "x_m", "y_m", "yaw_deg", "true_theta_deg", "raw_theta_deg", "theta_deg", "mag_mT", "phase",
)


def _circular_mean(angles: Sequence[float]) -> float:
    s = math.fsum(math.sin(math.radians(a)) for a in angles)
    c = math.fsum(math.cos(math.radians(a)) for a in angles)
    return wrap360(math.degrees(math.atan2(s, c)))


def _rms(errors: Sequence[float]) -> float:
    if not errors:
        return math.nan
    return math.sqrt(math.fsum(e * e for e in errors) / len(errors))


def characterize_position(cfg: ScenarioConfig, distance: float, seed) -> CharacterizeRun:
    """Hover, calibrate with the fan off, wait, then rotate in place."""
    p = cfg.trial
    cp = cfg.characterize
    rate = p.sensor.sample_rate
    dt = 1.0 / rate
    n_cal = _n(p.pipeline.calibration_time, rate)
    n_wait = _n(cp.wait_time, rate)
    n_rot = _n(cp.rotation_time, rate)
    window = p.pipeline.window

    home = _axis_point(cfg.fan, distance)
    rng = np.random.default_rng(seed)
    pipe = FlowPipeline(window, p.surge.detect_threshold)
    cal: List[FlowSample] = []
    st = QuadState(home, wrap360(cp.initial_yaw), ZERO, 0.0)
    ticks: List[CharacterizeTick] = []
    samples: List[FlowSample] = []
    estimates: List[FlowEstimate] = []
    recent: deque = deque(maxlen=window)
    err_avg: List[float] = []
    err_now: List[float] = []
    max_mag = 0.0

    for k in range(n_cal + n_wait + n_rot):
        st = QuadState(st.pos, st.yaw, st.vel, k / rate)
        fan_on = k >= n_cal
        w = wind_at(cfg.fan, st.pos) if fan_on else ZERO
        raw = sample(w, st, p.sensor, rng)
        samples.append(raw)
        truth = _true_theta(cfg.fan, w, st)
        phase = "Calibrate" if k < n_cal else "Wait" if k < n_cal + n_wait else "Rotate"
        theta = raw_theta = mag = None
        if k < n_cal:
            cal.append(raw)
            if k == n_cal - 1:
                pipe.calibrate(cal)
        else:
            est = pipe.update(raw)
            estimates.append(est)
            theta, mag = est.theta, est.magnitude
            max_mag = max(max_mag, mag)
            b = pipe.bias
            dx, dy = raw.bx - b.bias_x, raw.by - b.bias_y
            raw_theta = None if dx == 0.0 and dy == 0.0 else flow_angle(Vec2(dx, dy))
            recent.append(truth)
        if phase == "Rotate":
            if theta is None or truth is None:
                err_now.append(180.0)
            else:
                err_now.append(wrap180(theta - truth))
            if theta is None or any(a is None for a in recent):
                err_avg.append(180.0)
            else:
                err_avg.append(wrap180(theta - _circular_mean(recent)))
        ticks.append(CharacterizeTick(st.t, st.pos.x, st.pos.y, st.yaw, truth, raw_theta, theta, mag, phase))

        rate_cmd = cp.rotation_rate if k + 1 >= n_cal + n_wait else 0.0
        cmd = Command(hold_position(st, home, cp.hold_gain), rate_cmd)
        st = step(st, cmd, w, dt, p.vehicle)

    speed = cfg.fan.axial_speed(distance)
    no_flow = speed == 0.0
    return CharacterizeRun(
        distance, speed, ticks, samples, estimates,
        math.nan if no_flow else _rms(err_avg),
        math.nan if no_flow else _rms(err_now),
        max_mag,
    )


@dataclass
class CharacterizeResult:
    runs: List[CharacterizeRun]


def cmd_characterize(cfg: ScenarioConfig, out_dir: Union[str, Path, None] = None) -> CharacterizeResult:
    """Run the rotation protocol at each configured on-axis distance."""
    cfg.validate()
    runs = [
        characterize_position(cfg, d, [cfg.master_seed, i])
        for i, d in enumerate(cfg.characterize.distances)
    ]
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for r in runs:
            tag = f"{r.distance:g}"
            write_table(out / f"characterize_d{tag}.csv", CHARACTERIZE_COLUMNS, (
                [fmt6(tk.t), fmt6(tk.x), fmt6(tk.y), fmt6(tk.yaw), fmt6(tk.true_theta),
                 fmt6(tk.raw_theta), fmt6(tk.theta), fmt6(tk.mag), tk.phase]
                for tk in r.ticks
            ))
            write_stream(r.samples, out / f"characterize_d{tag}_stream.csv")
        write_table(out / "characterize_summary.csv",
                    ("distance_m", "speed_mps", "rms_error_deg", "rms_error_instant_deg", "max_mag_mT"),
                    ([fmt6(r.distance), fmt6(r.speed), fmt6(r.rms_error), fmt6(r.rms_error_instant),
                      fmt6(r.max_magnitude)] for r in runs))
    return CharacterizeResult(runs)


# ---- reorientation ---------------------------------------------------------

@dataclass
class ReorientCell:
    distance: float
    speed: float
    initial_error: float
    settle_time: Optional[float]  # s after the controller starts; None if never settled
    final_error: float
    times: List[float] = field(repr=False)
    errors: List[float] = field(repr=False)  # true heading error, deg
    thetas: List[Optional[float]] = field(repr=False)
    yaw_rates: List[float] = field(repr=False)


def settling_time(times: Sequence[float], errors: Sequence[float], band: float) -> Optional[float]:
    """Earliest time after which ``|error| <= band`` holds to the end."""
    settled = None
    for t, e in zip(times, errors):
        if abs(e) <= band:
            if settled is None:
                settled = t
        else:
            settled = None
    return settled


def reorient_cell(cfg: ScenarioConfig, distance: float, initial_error: float, seed) -> ReorientCell:
    p = cfg.trial
    rp = cfg.reorient
    rate = p.sensor.sample_rate
    dt = 1.0 / rate
    n_cal = _n(p.pipeline.calibration_time, rate)
    n_wait = _n(rp.wait_time, rate)
    n_run = _n(rp.duration, rate)

    home = _axis_point(cfg.fan, distance)
    upwind = wrap360(cfg.fan.heading + 180.0)
    st = QuadState(home, wrap360(upwind - initial_error), ZERO, 0.0)
    rng = np.random.default_rng(seed)
    pipe = FlowPipeline(p.pipeline.window, p.surge.detect_threshold)
    cal: List[FlowSample] = []
    prev: Optional[float] = None
    times, errors, thetas, rates = [], [], [], []
    t0 = (n_cal + n_wait) / rate

    for k in range(n_cal + n_wait + n_run + 1):
        st = QuadState(st.pos, st.yaw, st.vel, k / rate)
        w = wind_at(cfg.fan, st.pos) if k >= n_cal else ZERO
        raw = sample(w, st, p.sensor, rng)
        est = None
        if k < n_cal:
            cal.append(raw)
            if k == n_cal - 1:
                pipe.calibrate(cal)
        else:
            est = pipe.update(raw)
        yaw_rate = 0.0
        if k >= n_cal + n_wait:
            truth = _true_theta(cfg.fan, w, st)
            times.append(st.t - t0)
            errors.append(180.0 if truth is None else heading_error(truth))
            thetas.append(est.theta)
            if est.theta is not None:
                yaw_rate = yaw_rate_cmd(est.theta, prev, dt, p.surge.gains)
                prev = heading_error(est.theta)
            rates.append(yaw_rate)
        if k == n_cal + n_wait + n_run:
            break
        cmd = Command(hold_position(st, home, rp.hold_gain), yaw_rate)
        st = step(st, cmd, w, dt, p.vehicle)

    return ReorientCell(
        distance, cfg.fan.axial_speed(distance), initial_error,
        settling_time(times, errors, rp.settle_band), errors[-1], times, errors, thetas, rates,
    )


@dataclass
class ReorientResult:
    cells: List[ReorientCell]

    def settled_within(self, limit: float) -> int:
        return sum(1 for c in self.cells if c.settle_time is not None and c.settle_time <= limit + _EPS)


def cmd_reorient(cfg: ScenarioConfig, out_dir: Union[str, Path, None] = None) -> ReorientResult:
    """Run the distance x initial-error grid of PD reorientation tests."""
    cfg.validate()
    cells = []
    for i, d in enumerate(cfg.reorient.distances):
        for j, e0 in enumerate(cfg.reorient.initial_errors):
            cells.append(reorient_cell(cfg, d, e0, [cfg.master_seed, i, j]))
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for c in cells:
            write_table(out / f"reorient_d{c.distance:g}_e{c.initial_error:g}.csv",
                        ("t_s", "true_error_deg", "theta_deg", "cmd_yawrate"),
                        ([fmt6(t), fmt6(e), fmt6(th), fmt6(r)]
                         for t, e, th, r in zip(c.times, c.errors, c.thetas, c.yaw_rates)))
        write_table(out / "reorient_summary.csv",
                    ("distance_m", "speed_mps", "initial_error_deg", "settle_time_s", "final_error_deg"),
                    ([fmt6(c.distance), fmt6(c.speed), fmt6(c.initial_error), fmt6(c.settle_time),
                      fmt6(c.final_error)] for c in cells))
    return ReorientResult(cells)


# ---- seeking ---------------------------------------------------------------

def trial_seed(master_seed: int, index: int) -> int:
    """Independent per-trial seed derived from the master seed and trial index."""
    return int(np.random.SeedSequence([master_seed, index]).generate_state(1)[0])


def start_pose(cfg: ScenarioConfig, seed: int) -> QuadState:
    """Random start pose drawn from the configured start region."""
    if cfg.start_pose is not None:
        x, y, yaw = cfg.start_pose
        return QuadState(Vec2(x, y), wrap360(yaw))
    r = cfg.start
    a = cfg.trial.arena
    rng = np.random.default_rng([seed, 1])
    lo_x, hi_x = r.margin, a.width - r.margin
    lo_y, hi_y = r.margin, a.height - r.margin
    if not (lo_x < hi_x and lo_y < hi_y):
        raise ConfigError("trial.start_margin leaves no room inside the arena")
    for _ in range(100_000):
        p = Vec2(rng.uniform(lo_x, hi_x), rng.uniform(lo_y, hi_y))
        rel = p - cfg.fan.origin
        d = rel.norm()
        if d <= r.keepout:
            continue
        if r.mode == "sector":
            if d > r.max_distance or cfg.fan.off_axis_angle(p) > r.max_off_axis:
                continue
        return QuadState(p, rng.uniform(0.0, 360.0))
    raise ConfigError("start region has no admissible points inside the arena")


def run_seek(cfg: ScenarioConfig, index: int = 0) -> Tuple[int, TrialLog]:
    seed = trial_seed(cfg.master_seed, index)
    return seed, run_trial(start_pose(cfg, seed), cfg.fan, cfg.trial, seed=seed)


def _write_trial(cfg: ScenarioConfig, log: TrialLog, out: Path, stem: str) -> None:
    write_ticks(log.ticks, out / f"{stem}.csv")
    if cfg.svg:
        from .svg import render_svg
        render_svg(log, out / f"{stem}.svg", fan=cfg.fan, arena=cfg.trial.arena)


def cmd_seek(cfg: ScenarioConfig, out_dir: Union[str, Path, None] = None) -> TrialLog:
    """A single seek trial from the configured or seeded start pose."""
    cfg.validate()
    _, log = run_seek(cfg, 0)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        _write_trial(cfg, log, out, "seek")
    return log


@dataclass
class BatchResult:
    rows: List[List[str]]
    summaries: list
    seeds: List[int]

    @property
    def success_rate(self) -> float:
        return sum(s.outcome is Outcome.SUCCESS for s in self.summaries) / len(self.summaries)

    @property
    def median_success_time(self) -> Optional[float]:
        times = [s.completion_time for s in self.summaries if s.outcome is Outcome.SUCCESS]
        return float(np.median(times)) if times else None

    def table(self) -> str:
        lines = [",".join(SUMMARY_COLUMNS)] + [",".join(r) for r in self.rows]
        return "\n".join(lines) + "\n"


def cmd_batch(cfg: ScenarioConfig, out_dir: Union[str, Path, None] = None) -> BatchResult:
    """Run ``trial_count`` seeded seek trials and collect the summary table."""
    cfg.validate()
    if cfg.trial_count < 1:
        raise ConfigError("trial.trial_count must be >= 1 for a batch")
    out = None
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
    rows, summaries, seeds = [], [], []
    for i in range(cfg.trial_count):
        seed, log = run_seek(cfg, i)
        rows.append(summary_row(i, seed, log.summary))
        summaries.append(log.summary)
        seeds.append(seed)
        if out is not None:
            _write_trial(cfg, log, out, f"trial_{i:03d}")
    res = BatchResult(rows, summaries, seeds)
    if out is not None:
        (out / "summary.csv").write_text(res.table())
    return res


# ---- replay ----------------------------------------------------------------

def write_stream(samples: Sequence[FlowSample], path: Union[str, Path]) -> None:
    """Write raw samples in the replay format at full float precision."""
    write_table(path, STREAM_COLUMNS, ([repr(s.t), repr(s.bx), repr(s.by)] for s in samples))


def read_stream(path: Union[str, Path]) -> List[FlowSample]:
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise ReplayParseError(f"cannot open {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ReplayParseError("file is empty", line=1)
        if tuple(h.strip() for h in header) != STREAM_COLUMNS:
            raise ReplayParseError(f"expected header {','.join(STREAM_COLUMNS)}", line=1)
        out = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ReplayParseError(f"expected 3 fields, got {len(row)}", line=lineno)
            try:
                out.append(FlowSample(float(row[0]), float(row[1]), float(row[2])))
            except ValueError as exc:
                raise ReplayParseError(str(exc), line=lineno) from exc
    return out


@dataclass
class ReplayResult:
    bias: CalibrationBias
    times: List[float]
    estimates: List[FlowEstimate]


REPLAY_COLUMNS = ("t_s", "theta_deg", "mag_mT", "detected")


def replay_samples(samples: Sequence[FlowSample], cfg: ScenarioConfig) -> ReplayResult:
    """Calibrate on the leading rows, then run the pipeline over the rest."""
    if not samples:
        raise ReplayValidationError("replay stream has no samples")
    try:
        check_stream(samples)
    except InvalidArgumentError as exc:
        raise ReplayValidationError(str(exc)) from exc
    n_cal = _n(cfg.trial.pipeline.calibration_time, cfg.trial.sensor.sample_rate)
    if len(samples) <= n_cal:
        raise ReplayValidationError(
            f"replay stream needs more than {n_cal} rows (the calibration window), got {len(samples)}"
        )
    pipe = FlowPipeline(cfg.trial.pipeline.window, cfg.trial.surge.detect_threshold)
    bias = pipe.calibrate(samples[:n_cal])
    rest = samples[n_cal:]
    return ReplayResult(bias, [s.t for s in rest], [pipe.update(s) for s in rest])


def cmd_replay(path: Union[str, Path], cfg: ScenarioConfig, out_dir: Union[str, Path, None] = None) -> ReplayResult:
    res = replay_samples(read_stream(path), cfg)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_table(out / "replay.csv", REPLAY_COLUMNS, (
            [fmt6(t), fmt6(e.theta), fmt6(e.magnitude), "1" if e.detected else "0"]
            for t, e in zip(res.times, res.estimates)
        ))
    return res
