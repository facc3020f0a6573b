"""Self-contained SVG plots of sweep records.

The SVG is written by hand so the output has no plotting dependency and the
path data stays easy to inspect: the median curve is ``<polyline
id="median">``, the p10-p25 band is ``<polygon id="band">``, best-of values are
``<circle class="best">`` and bound overlays are ``<polyline
id="bound-<name>">``.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Optional
from xml.sax.saxutils import escape

from .errors import EmptyInput

WIDTH, HEIGHT = 640, 440
MARGIN = dict(left=70, right=150, top=40, bottom=55)
FLOOR = 1e-16
BOUND_STYLES = {
    "ultimate": "#888888",
    "cross": "#d62728",
    "thm8": "#2ca02c",
}


def _tr(v: float, log: bool) -> float:
    return math.log10(max(v, FLOOR)) if log else v


class _Axes:
    def __init__(self, xs, ys, logx, logy):
        self.logx, self.logy = logx, logy
        tx = [_tr(x, logx) for x in xs]
        ty = [_tr(y, logy) for y in ys]
        self.x0, self.x1 = _pad(min(tx), max(tx))
        self.y0, self.y1 = _pad(min(ty), max(ty))
        self.w = WIDTH - MARGIN["left"] - MARGIN["right"]
        self.h = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(self, x: float) -> float:
        return MARGIN["left"] + (_tr(x, self.logx) - self.x0) / (self.x1 - self.x0) * self.w

    def py(self, y: float) -> float:
        return MARGIN["top"] + (self.y1 - _tr(y, self.logy)) / (self.y1 - self.y0) * self.h


def _pad(lo: float, hi: float) -> tuple[float, float]:
    if hi - lo < 1e-12:
        return lo - 0.5, hi + 0.5
    d = 0.05 * (hi - lo)
    return lo - d, hi + d


def _ticks(lo: float, hi: float, log: bool) -> list:
    if log:
        return [10.0**e for e in range(math.ceil(lo), math.floor(hi) + 1)] or [10.0 ** ((lo + hi) / 2)]
    step = 10 ** math.floor(math.log10((hi - lo) / 4 or 1))
    for mult in (1, 2, 5, 10):
        if (hi - lo) / (step * mult) <= 6:
            step *= mult
            break
    t = math.ceil(lo / step) * step
    out = []
    while t <= hi + 1e-12:
        out.append(round(t, 12))
        t += step
    return out


def _pts(pairs) -> str:
    return " ".join(f"{x:.3f},{y:.3f}" for x, y in pairs)


def emit_plot(
    records: list,
    style: str = "loglog",
    path=None,
    title: str = "",
    xlabel: str = "axis",
    ylabel: str = "max-norm error",
    bounds: Optional[tuple] = ("ultimate", "cross", "thm8"),
) -> str:
    """Render records as an SVG string; also written to ``path`` when given.

    ``style`` is ``"loglog"`` (both axes logarithmic) or ``"semilog"``
    (logarithmic y only). Non-finite values and failed records are skipped.
    """
    if style not in ("loglog", "semilog"):
        raise ValueError(f"style must be 'loglog' or 'semilog', got {style!r}")
    recs = [r for r in records if not getattr(r, "failed", False) and math.isfinite(r.median)]
    if not recs:
        raise EmptyInput("no records to plot")
    recs = sorted(recs, key=lambda r: r.axis_value)
    logx, logy = style == "loglog", True

    overlays = {}
    for name in bounds or ():
        pts = [(r.axis_value, getattr(r, name)) for r in recs if math.isfinite(getattr(r, name)) and getattr(r, name) > 0]
        if pts:
            overlays[name] = pts

    xs = [r.axis_value for r in recs]
    ys = [v for r in recs for v in (r.best, r.p10, r.p25, r.median)]
    ys += [y for pts in overlays.values() for _, y in pts]
    ax = _Axes(xs, ys, logx, logy)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>')

    left, top = MARGIN["left"], MARGIN["top"]
    right, bottom = left + ax.w, top + ax.h
    out.append(f'<rect x="{left}" y="{top}" width="{ax.w}" height="{ax.h}" fill="none" stroke="black"/>')
    for t in _ticks(ax.x0, ax.x1, logx):
        x = ax.px(t)
        if left - 1e-6 <= x <= right + 1e-6:
            out.append(f'<line x1="{x:.3f}" y1="{bottom}" x2="{x:.3f}" y2="{bottom + 5}" stroke="black"/>')
            out.append(f'<text x="{x:.3f}" y="{bottom + 18}" text-anchor="middle">{t:g}</text>')
    for t in _ticks(ax.y0, ax.y1, logy):
        y = ax.py(t)
        if top - 1e-6 <= y <= bottom + 1e-6:
            out.append(f'<line x1="{left - 5}" y1="{y:.3f}" x2="{left}" y2="{y:.3f}" stroke="black"/>')
            out.append(f'<text x="{left - 8}" y="{y + 4:.3f}" text-anchor="end">{t:g}</text>')
    out.append(f'<text x="{(left + right) / 2:.1f}" y="{HEIGHT - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(
        f'<text x="16" y="{(top + bottom) / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {(top + bottom) / 2:.1f})">{escape(ylabel)}</text>'
    )

    if len(recs) > 1:
        upper = [(ax.px(r.axis_value), ax.py(r.p25)) for r in recs]
        lower = [(ax.px(r.axis_value), ax.py(r.p10)) for r in reversed(recs)]
        out.append(f'<polygon id="band" points="{_pts(upper + lower)}" fill="#1f77b4" fill-opacity="0.2" stroke="none"/>')
        med = [(ax.px(r.axis_value), ax.py(r.median)) for r in recs]
        out.append(f'<polyline id="median" points="{_pts(med)}" fill="none" stroke="#1f77b4" stroke-width="2"/>')
    for r in recs:
        out.append(f'<circle class="best" cx="{ax.px(r.axis_value):.3f}" cy="{ax.py(r.best):.3f}" r="3.5" fill="#ff7f0e"/>')
    for name, pts in overlays.items():
        if len(pts) > 1:
            coords = [(ax.px(x), ax.py(y)) for x, y in pts]
            out.append(
                f'<polyline id="bound-{name}" points="{_pts(coords)}" fill="none" '
                f'stroke="{BOUND_STYLES.get(name, "black")}" stroke-dasharray="6,4"/>'
            )

    legend = [("median", "#1f77b4"), ("best", "#ff7f0e")] + [(f"{n} bound", BOUND_STYLES.get(n, "black")) for n in overlays]
    for i, (label, color) in enumerate(legend):
        y = top + 14 + 18 * i
        out.append(f'<line x1="{right + 12}" y1="{y}" x2="{right + 32}" y2="{y}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{right + 38}" y="{y + 4}">{escape(label)}</text>')
    out.append("</svg>")
    svg = "\n".join(out) + "\n"
    if path is not None:
        p = Path(path)
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(svg)
    return svg
