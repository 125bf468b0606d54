"""Single-flow-sensor source seeking for a small quadrotor, in simulation.

Modules follow the signal chain: ``wind_field`` (fan plume), ``sensor_model``
(whisker deflection), ``flow_pipeline`` (calibration, filtering, bearing),
``control`` (PD yaw servo), ``vehicle`` (planar kinematics) and
``vector_surge`` (the cast, reorient and surge state machine). ``scenarios``,
``config``, ``svg`` and ``cli`` form the experiment harness.
"""

from .errors import (
    CalibrationError,
    ConfigError,
    FlowSeekError,
    InvalidArgumentError,
    ReplayParseError,
    ReplayValidationError,
    UndefinedBearingError,
)
from .geometry import Vec2, wrap180, wrap360
from .vector_surge import Phase, SurgeParams, TrialParams, run_trial, transition
from .wind_field import FanPlume, wind_at

__version__ = "0.1.0"
