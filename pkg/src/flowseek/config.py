"""Scenario configuration: INI-style sections of flat ``key = value`` pairs.

Every key is optional and falls back to the module default. Unknown sections
or keys are rejected so typos do not silently fall back to defaults.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Dict, Optional, Tuple, Union

from .control import PdGains, ReorientMonitor
from .errors import ConfigError, FlowSeekError
from .flow_pipeline import PipelineParams
from .geometry import Vec2
from .sensor_model import SensorParams
from .trial_log import Arena
from .vector_surge import SurgeParams, TrialParams
from .vehicle import VehicleParams
from .wind_field import DEFAULT_ANCHORS, FanPlume

ON_AXIS_DISTANCES = tuple(d for d, _ in DEFAULT_ANCHORS)


@dataclass(frozen=True)
class StartRegion:
    """Where random seek trials begin.

    ``sector`` draws positions uniformly from the wedge downstream of the fan
    between ``keepout`` and ``max_distance`` and within ``max_off_axis``
    degrees of the plume axis. ``uniform`` draws from the whole arena minus
    the keep-out disc. Both keep ``margin`` metres from the walls and draw
    the heading uniformly.
    """

    mode: str = "sector"
    keepout: float = 1.0
    max_distance: float = 6.0
    max_off_axis: float = 25.0
    margin: float = 0.5

    def validate(self) -> None:
        if self.mode not in ("sector", "uniform"):
            raise ConfigError(f"trial.start_mode must be 'sector' or 'uniform', got {self.mode!r}")
        if not self.keepout >= 0:
            raise ConfigError("trial.start_keepout must be >= 0")
        if not self.margin >= 0:
            raise ConfigError("trial.start_margin must be >= 0")
        if self.mode == "sector":
            if not self.max_distance > self.keepout:
                raise ConfigError("trial.start_max_distance must exceed trial.start_keepout")
            if not 0 < self.max_off_axis <= 90:
                raise ConfigError("trial.start_max_off_axis must be in (0, 90]")


@dataclass(frozen=True)
class CharacterizeParams:
    distances: Tuple[float, ...] = ON_AXIS_DISTANCES
    wait_time: float = 10.0  # s of fan spin-up before rotating
    rotation_rate: float = 24.0  # deg/s
    rotation_time: float = 60.0
    initial_yaw: float = 0.0
    hold_gain: float = 0.5  # 1/s, station keeping

    def validate(self) -> None:
        if not self.distances or not all(d > 0 for d in self.distances):
            raise ConfigError("characterize.distances must be a non-empty list of positive values")
        if not self.wait_time >= 0:
            raise ConfigError("characterize.wait_time must be >= 0")
        if not self.rotation_time > 0:
            raise ConfigError("characterize.rotation_time must be > 0")
        if not abs(self.rotation_rate) <= 100.0:
            raise ConfigError("characterize.rotation_rate must be within the 100 deg/s yaw-rate clamp")
        if not self.hold_gain >= 0:
            raise ConfigError("characterize.hold_gain must be >= 0")


@dataclass(frozen=True)
class ReorientParams:
    distances: Tuple[float, ...] = ON_AXIS_DISTANCES
    initial_errors: Tuple[float, ...] = (180.0, 90.0, 45.0)
    wait_time: float = 10.0
    duration: float = 20.0  # s of closed-loop servoing per cell
    settle_band: float = 20.0  # deg
    hold_gain: float = 0.5

    def validate(self) -> None:
        if not self.distances or not all(d > 0 for d in self.distances):
            raise ConfigError("reorient.distances must be a non-empty list of positive values")
        if not self.initial_errors or not all(0 <= e <= 180 for e in self.initial_errors):
            raise ConfigError("reorient.initial_errors must be a non-empty list of values in [0, 180]")
        if not self.wait_time >= 0:
            raise ConfigError("reorient.wait_time must be >= 0")
        if not self.duration > 0:
            raise ConfigError("reorient.duration must be > 0")
        if not 0 < self.settle_band < 180:
            raise ConfigError("reorient.settle_band must be in (0, 180)")
        if not self.hold_gain >= 0:
            raise ConfigError("reorient.hold_gain must be >= 0")


@dataclass(frozen=True)
class ScenarioConfig:
    fan: FanPlume = field(default_factory=lambda: FanPlume(origin=Vec2(0.5, 5.0), heading=0.0))
    trial: TrialParams = field(default_factory=TrialParams)
    start: StartRegion = field(default_factory=StartRegion)
    start_pose: Optional[Tuple[float, float, float]] = None  # fixed (x, y, yaw) for `seek`
    characterize: CharacterizeParams = field(default_factory=CharacterizeParams)
    reorient: ReorientParams = field(default_factory=ReorientParams)
    trial_count: int = 50
    master_seed: int = 0
    out_dir: str = "out"
    svg: bool = False

    def validate(self) -> None:
        """Check every block; module errors are re-raised as ``ConfigError``."""
        try:
            self.fan.validate()
            self.trial.resolved().validate()
        except ConfigError:
            raise
        except FlowSeekError as exc:
            raise ConfigError(str(exc)) from exc
        self.start.validate()
        self.characterize.validate()
        self.reorient.validate()
        if self.trial_count < 0:
            raise ConfigError("trial.trial_count must be >= 0")
        if self.master_seed < 0:
            raise ConfigError("trial.master_seed must be >= 0")
        if self.start_pose is not None and not self.trial.arena.contains(*self.start_pose[:2]):
            raise ConfigError("trial.start_x/start_y must lie inside the arena")

    def with_overrides(
        self,
        seed: Optional[int] = None,
        trials: Optional[int] = None,
        out: Optional[str] = None,
        svg: Optional[bool] = None,
        noise: Optional[float] = None,
    ) -> ScenarioConfig:
        cfg = self
        if seed is not None:
            cfg = replace(cfg, master_seed=seed)
        if trials is not None:
            cfg = replace(cfg, trial_count=trials)
        if out is not None:
            cfg = replace(cfg, out_dir=out)
        if svg:
            cfg = replace(cfg, svg=True)
        if noise is not None:
            try:
                sensor = replace(cfg.trial.sensor, noise_sigma=noise)
            except FlowSeekError as exc:
                raise ConfigError(f"--noise: {exc}") from exc
            cfg = replace(cfg, trial=replace(cfg.trial, sensor=sensor))
        cfg.validate()
        return cfg


# ---- parsing ---------------------------------------------------------------

def _float(s: str) -> float:
    v = float(s)
    if not math.isfinite(v):
        raise ValueError(f"{s!r} is not finite")
    return v


def _int(s: str) -> int:
    return int(s)


def _bool(s: str) -> bool:
    low = s.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"{s!r} is not a boolean")


def _floats(s: str) -> Tuple[float, ...]:
    return tuple(_float(p) for p in s.split(",") if p.strip())


def _anchors(s: str) -> Tuple[Tuple[float, float], ...]:
    out = []
    for part in s.split(","):
        if not part.strip():
            continue
        d, sep, v = part.partition(":")
        if not sep:
            raise ValueError(f"anchor {part.strip()!r} is not 'distance:speed'")
        out.append((_float(d), _float(v)))
    return tuple(out)


def _opt_float(s: str) -> Optional[float]:
    return None if s.strip().lower() in ("", "auto") else _float(s)


# section -> key -> value parser
_SCHEMA: Dict[str, Dict[str, Callable[[str], object]]] = {
    "arena": {"width": _float, "height": _float},
    "fan": {
        "x": _float, "y": _float, "heading": _float, "half_width_deg": _float,
        "cutoff_distance": _float, "anchors": _anchors,
    },
    "sensor": {
        "exponent_p": _float, "gain_c": _opt_float, "saturation": _float, "noise_sigma": _float,
        "sample_rate": _float, "offset_x": _float, "offset_y": _float,
    },
    "pipeline": {"window": _int, "calibration_time": _float},
    "vehicle": {"tau": _float, "drift_gain": _float},
    "control": {"kp": _float, "kd": _float, "tolerance": _float, "hold_time": _float},
    "surge": {
        "detect_threshold": _float, "stop_threshold": _opt_float, "loss_threshold": _opt_float,
        "loss_hold": _float, "reorient_floor": _opt_float, "cast_base": _float,
        "cast_increment": _float, "cast_speed": _float, "surge_speed": _float,
        "plateau_hold": _float, "plateau_tol": _float, "peak_drop": _float,
        "stop_reference_speed": _float,
    },
    "trial": {
        "time_limit": _float, "success_radius": _float, "trial_count": _int, "master_seed": _int,
        "start_mode": str.strip, "start_keepout": _float, "start_max_distance": _float,
        "start_max_off_axis": _float, "start_margin": _float,
        "start_x": _float, "start_y": _float, "start_yaw": _float,
    },
    "characterize": {
        "distances": _floats, "wait_time": _float, "rotation_rate": _float,
        "rotation_time": _float, "initial_yaw": _float, "hold_gain": _float,
    },
    "reorient": {
        "distances": _floats, "initial_errors": _floats, "wait_time": _float,
        "duration": _float, "settle_band": _float, "hold_gain": _float,
    },
    "output": {"dir": str.strip, "svg": _bool},
}


def _read_sections(text: str, source: str) -> Dict[str, Dict[str, object]]:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    if cp.defaults():
        raise ConfigError(f"{source}: keys outside a section are not allowed")
    out: Dict[str, Dict[str, object]] = {}
    for sec in cp.sections():
        if sec not in _SCHEMA:
            raise ConfigError(f"{source}: unknown section [{sec}]")
        vals: Dict[str, object] = {}
        for key, raw in cp.items(sec):
            parser = _SCHEMA[sec].get(key)
            if parser is None:
                raise ConfigError(f"{source}: unknown key {sec}.{key}")
            try:
                vals[key] = parser(raw)
            except ValueError as exc:
                raise ConfigError(f"{source}: bad value for {sec}.{key}: {exc}") from exc
        out[sec] = vals
    return out


def _build(secs: Dict[str, Dict[str, object]]) -> ScenarioConfig:
    d = ScenarioConfig()

    def get(sec, key, default):
        return secs.get(sec, {}).get(key, default)

    arena = Arena(get("arena", "width", d.trial.arena.width), get("arena", "height", d.trial.arena.height))
    fan = FanPlume(
        origin=Vec2(get("fan", "x", d.fan.origin.x), get("fan", "y", d.fan.origin.y)),
        heading=get("fan", "heading", d.fan.heading),
        anchors=get("fan", "anchors", d.fan.anchors),
        half_width_deg=get("fan", "half_width_deg", d.fan.half_width_deg),
        cutoff_distance=get("fan", "cutoff_distance", d.fan.cutoff_distance),
    )
    sensor_kw = {k: v for k, v in secs.get("sensor", {}).items()}
    sensor = SensorParams(**sensor_kw)
    pipeline = PipelineParams(
        get("pipeline", "window", d.trial.pipeline.window),
        get("pipeline", "calibration_time", d.trial.pipeline.calibration_time),
    )
    vehicle = VehicleParams(**secs.get("vehicle", {}))
    ctl = secs.get("control", {})
    gains = PdGains(ctl.get("kp", PdGains.kp), ctl.get("kd", PdGains.kd))
    monitor = ReorientMonitor(ctl.get("tolerance", ReorientMonitor.tolerance),
                              ctl.get("hold_time", ReorientMonitor.hold_time))
    surge = SurgeParams(gains=gains, **secs.get("surge", {}))
    trial = TrialParams(
        sensor=sensor, vehicle=vehicle, pipeline=pipeline, surge=surge, monitor=monitor, arena=arena,
        time_limit=get("trial", "time_limit", d.trial.time_limit),
        success_radius=get("trial", "success_radius", d.trial.success_radius),
    )
    ds = d.start
    start = StartRegion(
        mode=get("trial", "start_mode", ds.mode),
        keepout=get("trial", "start_keepout", ds.keepout),
        max_distance=get("trial", "start_max_distance", ds.max_distance),
        max_off_axis=get("trial", "start_max_off_axis", ds.max_off_axis),
        margin=get("trial", "start_margin", ds.margin),
    )
    t = secs.get("trial", {})
    given = [k for k in ("start_x", "start_y", "start_yaw") if k in t]
    if given and len(given) != 3:
        raise ConfigError("trial.start_x, trial.start_y and trial.start_yaw must be given together")
    start_pose = (t["start_x"], t["start_y"], t["start_yaw"]) if given else None
    characterize = CharacterizeParams(**secs.get("characterize", {}))
    reorient = ReorientParams(**secs.get("reorient", {}))
    return ScenarioConfig(
        fan=fan, trial=trial, start=start, start_pose=start_pose,
        characterize=characterize, reorient=reorient,
        trial_count=get("trial", "trial_count", d.trial_count),
        master_seed=get("trial", "master_seed", d.master_seed),
        out_dir=get("output", "dir", d.out_dir),
        svg=get("output", "svg", d.svg),
    )


def loads(text: str, source: str = "<config>") -> ScenarioConfig:
    """Parse and validate configuration text."""
    secs = _read_sections(text, source)
    try:
        cfg = _build(secs)
    except ConfigError:
        raise
    except FlowSeekError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    try:
        cfg.validate()
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    return cfg


def load(path: Union[str, Path, None]) -> ScenarioConfig:
    """Load a config file; ``None`` gives the validated defaults."""
    if path is None:
        cfg = ScenarioConfig()
        cfg.validate()
        return cfg
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return loads(text, str(path))


DEFAULT_CONFIG_TEXT = """\
# Every key is optional; values shown are the defaults.
[arena]
width = 10.0
height = 10.0

[fan]
x = 0.5
y = 5.0
heading = 0.0
half_width_deg = 15.0
cutoff_distance = 9.0
anchors = 1.5:1.24, 3.0:0.80, 4.5:0.40, 6.0:0.20

[sensor]
exponent_p = 2.0
gain_c = auto
saturation = 250.0
noise_sigma = 0.5
sample_rate = 40.0
offset_x = 1.5
offset_y = -0.8

[pipeline]
window = 10
calibration_time = 2.0

[vehicle]
tau = 0.5
drift_gain = 0.1

[control]
kp = 0.6
kd = 0.08
tolerance = 10.0
hold_time = 1.0

[surge]
detect_threshold = 4.6
stop_threshold = auto
loss_threshold = auto
loss_hold = 1.5
reorient_floor = auto
cast_base = 2.0
cast_increment = 1.0
cast_speed = 0.2
surge_speed = 0.2
plateau_hold = 2.0
plateau_tol = 0.05
peak_drop = 0.15
stop_reference_speed = 0.3

[trial]
time_limit = 120.0
success_radius = 1.5
trial_count = 50
master_seed = 0
start_mode = sector
start_keepout = 1.0
start_max_distance = 6.0
start_max_off_axis = 25.0
start_margin = 0.5

[characterize]
distances = 1.5, 3.0, 4.5, 6.0
wait_time = 10.0
rotation_rate = 24.0
rotation_time = 60.0
initial_yaw = 0.0
hold_gain = 0.5

[reorient]
distances = 1.5, 3.0, 4.5, 6.0
initial_errors = 180, 90, 45
wait_time = 10.0
duration = 20.0
settle_band = 20.0
hold_gain = 0.5

[output]
dir = out
svg = false
"""
