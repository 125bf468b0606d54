"""Static SVG plot of a seek trial: path coloured by flow magnitude, heading
arrows once per second, the fan and the arena outline.

Output is plain text with fixed number formatting, so identical logs give
byte-identical files.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union
from xml.sax.saxutils import escape

from .trial_log import Arena, TrialLog
from .wind_field import FanPlume

# viridis, sampled at five evenly spaced points
_STOPS = ((68, 1, 84), (59, 82, 139), (33, 145, 140), (94, 201, 98), (253, 231, 37))
_LEVELS = 32
_NO_FLOW = "#b0b0b0"


def colour(u: float) -> str:
    """Map ``u`` in [0, 1] to a hex colour on the palette."""
    u = min(max(u, 0.0), 1.0) * (len(_STOPS) - 1)
    i = min(int(u), len(_STOPS) - 2)
    f = u - i
    a, b = _STOPS[i], _STOPS[i + 1]
    return "#" + "".join(f"{round(x + (y - x) * f):02x}" for x, y in zip(a, b))


def _f(v: float) -> str:
    return f"{v:.2f}"


class _Canvas:
    def __init__(self, arena: Arena, scale: float, pad: float):
        self.arena, self.scale, self.pad = arena, scale, pad
        self.width = arena.width * scale + 2 * pad
        self.height = arena.height * scale + 2 * pad + 24  # room for the legend

    def xy(self, x: float, y: float) -> Tuple[str, str]:
        return _f(self.pad + x * self.scale), _f(self.pad + (self.arena.height - y) * self.scale)


def _bucket(mag: Optional[float], top: float) -> int:
    if mag is None or top <= 0:
        return -1
    return min(int(mag / top * _LEVELS), _LEVELS - 1)


def _fan_glyph(c: _Canvas, fan: FanPlume) -> List[str]:
    a = math.radians(fan.heading)
    ux, uy = math.cos(a), math.sin(a)
    ox, oy = fan.origin.x, fan.origin.y
    s = 0.25  # glyph size, m
    tip = (ox + ux * s, oy + uy * s)
    left = (ox - uy * s * 0.8, oy + ux * s * 0.8)
    right = (ox + uy * s * 0.8, oy - ux * s * 0.8)
    pts = " ".join(",".join(c.xy(*p)) for p in (left, tip, right))
    cx, cy = c.xy(ox, oy)
    return [
        '<g id="fan">',
        f'<polygon points="{pts}" fill="#d62728" stroke="#7f1416" stroke-width="1"/>',
        f'<circle cx="{cx}" cy="{cy}" r="3" fill="#7f1416"/>',
        "</g>",
    ]


def svg_text(
    log: TrialLog,
    fan: Optional[FanPlume] = None,
    arena: Arena = Arena(),
    scale: float = 50.0,
    title: Optional[str] = None,
) -> str:
    ticks = log.ticks
    if not ticks:
        raise ValueError("cannot render an empty trial log")
    c = _Canvas(arena, scale, pad=20.0)
    mags = [tk.mag for tk in ticks if tk.mag is not None]
    top = max(mags) if mags else 0.0

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(c.width)}" height="{_f(c.height)}" '
        f'viewBox="0 0 {_f(c.width)} {_f(c.height)}">',
        "<defs>",
        '<marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="5" markerHeight="5" '
        'orient="auto-start-reverse"><path d="M0,0 L10,5 L0,10 z" fill="#222222"/></marker>',
        "</defs>",
    ]
    if title:
        out.append(f"<title>{escape(title)}</title>")
    x0, y0 = c.xy(0.0, arena.height)
    out.append(
        f'<rect id="arena" x="{x0}" y="{y0}" width="{_f(arena.width * scale)}" '
        f'height="{_f(arena.height * scale)}" fill="white" stroke="black" stroke-width="2"/>'
    )
    if fan is not None:
        out.extend(_fan_glyph(c, fan))

    if len(ticks) == 1:
        cx, cy = c.xy(ticks[0].x, ticks[0].y)
        out.append(f'<circle id="point" cx="{cx}" cy="{cy}" r="4" fill="#222222"/>')
    else:
        pts = " ".join(",".join(c.xy(tk.x, tk.y)) for tk in ticks)
        out.append(f'<polyline id="trajectory" points="{pts}" fill="none" stroke="#dddddd" stroke-width="5"/>')
        out.append('<g id="magnitude" fill="none" stroke-width="3" stroke-linecap="round">')
        out.extend(_coloured_runs(c, ticks, top))
        out.append("</g>")
        sx, sy = c.xy(ticks[0].x, ticks[0].y)
        ex, ey = c.xy(ticks[-1].x, ticks[-1].y)
        out.append(f'<circle id="start" cx="{sx}" cy="{sy}" r="4" fill="none" stroke="#222222"/>')
        out.append(f'<circle id="end" cx="{ex}" cy="{ey}" r="4" fill="#222222"/>')

    out.append('<g id="headings" stroke="#222222" stroke-width="1.2">')
    arrow = 0.35  # m
    for tk in ticks:
        ms = int(round(tk.t * 1000.0))
        if ms % 1000:
            continue
        a = math.radians(tk.yaw)
        x1, y1 = c.xy(tk.x, tk.y)
        x2, y2 = c.xy(tk.x + arrow * math.cos(a), tk.y + arrow * math.sin(a))
        out.append(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" marker-end="url(#arrow)"/>')
    out.append("</g>")

    ly = _f(c.height - 10)
    out.append(
        f'<text x="{_f(c.pad)}" y="{ly}" font-family="sans-serif" font-size="12">'
        f"magnitude 0 to {top:.1f} mT; {escape(log.summary.outcome.value)} at t={log.summary.completion_time:.2f} s"
        "</text>"
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _coloured_runs(c: _Canvas, ticks: Sequence, top: float) -> List[str]:
    """One ``<path>`` per run of consecutive segments sharing a colour level."""
    out = []
    run: List[Tuple[str, str]] = []
    level = None
    for a, b in zip(ticks, ticks[1:]):
        lv = _bucket(a.mag, top)
        if lv != level and run:
            out.append(_run_path(run, level))
            run = []
        if not run:
            run.append(c.xy(a.x, a.y))
        run.append(c.xy(b.x, b.y))
        level = lv
    if run:
        out.append(_run_path(run, level))
    return out


def _run_path(pts: Sequence[Tuple[str, str]], level: int) -> str:
    stroke = _NO_FLOW if level < 0 else colour((level + 0.5) / _LEVELS)
    d = "M" + " L".join(f"{x},{y}" for x, y in pts)
    return f'<path d="{d}" stroke="{stroke}"/>'


def render_svg(
    log: TrialLog,
    path: Union[str, Path],
    fan: Optional[FanPlume] = None,
    arena: Arena = Arena(),
    scale: float = 50.0,
) -> str:
    """Write the trial plot to ``path`` and return the SVG text."""
    text = svg_text(log, fan=fan, arena=arena, scale=scale)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)
    return text
