"""Per-tick trial records, CSV serialisation and summary metrics."""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, TextIO, Union

from .errors import ReplayParseError

CSV_COLUMNS = (
    "t_s",
    "x_m",
    "y_m",
    "yaw_deg",
    "bx_mT",
    "by_mT",
    "theta_deg",
    "mag_mT",
    "detected",
    "phase",
    "cmd_vx",
    "cmd_vy",
    "cmd_yawrate",
)


def q6(x: float) -> float:
    """Round to 6 significant digits, the precision stored in CSV logs."""
    return float(f"{x:.6g}")


def fmt6(x: Optional[float]) -> str:
    return "" if x is None else f"{x:.6g}"


class Outcome(str, enum.Enum):
    SUCCESS = "Success"
    MISSED = "Missed"  # stopped outside the success radius
    TIMEOUT = "Timeout"
    ESCAPED = "Escaped"


@dataclass(frozen=True, slots=True)
class TickRecord:
    t: float
    x: float
    y: float
    yaw: float
    bx: float
    by: float
    theta: Optional[float]
    mag: Optional[float]
    detected: bool
    phase: str
    cmd_vx: float
    cmd_vy: float
    cmd_yawrate: float

    @classmethod
    def quantised(cls, t, x, y, yaw, bx, by, theta, mag, detected, phase, cmd_vx, cmd_vy, cmd_yawrate):
        return cls(
            q6(t), q6(x), q6(y), q6(yaw), q6(bx), q6(by),
            None if theta is None else q6(theta),
            None if mag is None else q6(mag),
            bool(detected), phase, q6(cmd_vx), q6(cmd_vy), q6(cmd_yawrate),
        )

    def row(self) -> List[str]:
        return [
            fmt6(self.t), fmt6(self.x), fmt6(self.y), fmt6(self.yaw),
            fmt6(self.bx), fmt6(self.by), fmt6(self.theta), fmt6(self.mag),
            "1" if self.detected else "0", self.phase,
            fmt6(self.cmd_vx), fmt6(self.cmd_vy), fmt6(self.cmd_yawrate),
        ]


@dataclass(frozen=True)
class Arena:
    width: float = 10.0
    height: float = 10.0

    def contains(self, x: float, y: float) -> bool:
        return 0.0 < x < self.width and 0.0 < y < self.height


@dataclass(frozen=True)
class TrialSummary:
    outcome: Outcome
    completion_time: float
    final_distance: float
    path_length: float
    detect_time: Optional[float]


@dataclass
class TrialLog:
    ticks: List[TickRecord]
    summary: TrialSummary


def summarize(
    ticks: Sequence[TickRecord],
    fan_xy: tuple,
    arena: Arena,
    success_radius: float,
) -> TrialSummary:
    """Summary metrics computed from tick data alone."""
    if not ticks:
        raise ValueError("cannot summarise an empty trial")
    last = ticks[-1]
    dist = math.hypot(last.x - fan_xy[0], last.y - fan_xy[1])
    if not arena.contains(last.x, last.y):
        outcome = Outcome.ESCAPED
    elif last.phase == "Stopped":
        outcome = Outcome.SUCCESS if dist <= success_radius else Outcome.MISSED
    else:
        outcome = Outcome.TIMEOUT
    path = math.fsum(math.hypot(b.x - a.x, b.y - a.y) for a, b in zip(ticks, ticks[1:]))
    detect_time = next((tk.t for tk in ticks if tk.phase == "Reorient"), None)
    return TrialSummary(outcome, last.t, dist, path, detect_time)


def write_ticks(ticks: Iterable[TickRecord], out: Union[str, Path, TextIO]) -> None:
    if isinstance(out, (str, Path)):
        with open(out, "w", newline="") as fh:
            write_ticks(ticks, fh)
        return
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for tk in ticks:
        w.writerow(tk.row())


def ticks_to_csv(ticks: Iterable[TickRecord]) -> str:
    buf = io.StringIO()
    write_ticks(ticks, buf)
    return buf.getvalue()


def _opt(s: str) -> Optional[float]:
    return None if s == "" else float(s)


def read_ticks(src: Union[str, Path, TextIO]) -> List[TickRecord]:
    if isinstance(src, (str, Path)):
        with open(src, newline="") as fh:
            return read_ticks(fh)
    reader = csv.reader(src)
    header = next(reader, None)
    if header is None or tuple(header) != CSV_COLUMNS:
        raise ReplayParseError("unexpected trial log header", line=1)
    out = []
    for lineno, row in enumerate(reader, start=2):
        if len(row) != len(CSV_COLUMNS):
            raise ReplayParseError(f"expected {len(CSV_COLUMNS)} fields, got {len(row)}", line=lineno)
        try:
            out.append(
                TickRecord(
                    float(row[0]), float(row[1]), float(row[2]), float(row[3]),
                    float(row[4]), float(row[5]), _opt(row[6]), _opt(row[7]),
                    row[8] == "1", row[9], float(row[10]), float(row[11]), float(row[12]),
                )
            )
        except ValueError as exc:
            raise ReplayParseError(str(exc), line=lineno) from exc
    return out


SUMMARY_COLUMNS = ("trial", "seed", "outcome", "time_s", "path_m", "final_distance_m", "detect_time_s")


def summary_row(index: int, seed: int, s: TrialSummary) -> List[str]:
    return [
        str(index), str(seed), s.outcome.value, fmt6(s.completion_time), fmt6(s.path_length),
        fmt6(s.final_distance), fmt6(s.detect_time),
    ]


def write_table(path: Union[str, Path], header: Sequence[str], rows: Iterable[Sequence[str]]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
