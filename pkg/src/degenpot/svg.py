"""Minimal hand-rolled SVG scatter plots for scan output.

Plots potential against log|t| with a per-ring min/max envelope.  Values
arrive as the decimal strings of the CSV schema; magnitudes far outside
double range are clamped to the plot margins rather than rejected, since a
dip run legitimately reaches exponents like -6000.
"""

from __future__ import annotations

import mpmath
from mpmath import mpf, workprec

__all__ = ["scan_svg"]

_WIDTH = 720
_HEIGHT = 480
_MARGIN = 56


def _to_float(s):
    with workprec(64):
        x = mpf(s)
        return float(mpmath.nstr(x, 17, min_fixed=1, max_fixed=0))


def _log_float(s):
    """log of a positive decimal string, safe for exponents beyond doubles."""
    with workprec(64):
        x = mpf(s)
        if x <= 0:
            raise ValueError("radius must be positive")
        return float(mpmath.log(x))


def _axis_ticks(lo, hi, count=6):
    if hi <= lo:
        hi = lo + 1.0
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


def scan_svg(rows, title="potential scan") -> str:
    """Render scan rows (dicts of strings) as an SVG document string."""
    pts = []
    for row in rows:
        pts.append((_log_float(row["abs_t"]), _to_float(row["potential"])))
    if not pts:
        raise ValueError("no plottable rows")

    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo -= pad
    y_hi += pad

    def sx(x):
        return _MARGIN + (x - x_lo) / (x_hi - x_lo) * (_WIDTH - 2 * _MARGIN)

    def sy(y):
        return _HEIGHT - _MARGIN - (y - y_lo) / (y_hi - y_lo) * (_HEIGHT - 2 * _MARGIN)

    # group by ring (same abs_t string) for the envelope
    rings = {}
    order = []
    for row in rows:
        key = row["abs_t"]
        if key not in rings:
            rings[key] = []
            order.append(key)
        rings[key].append(_to_float(row["potential"]))

    env_min = []
    env_max = []
    for key in order:
        x = _log_float(key)
        env_min.append((sx(x), sy(min(rings[key]))))
        env_max.append((sx(x), sy(max(rings[key]))))

    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" '
        'viewBox="0 0 %d %d">' % (_WIDTH, _HEIGHT, _WIDTH, _HEIGHT),
        '<rect width="%d" height="%d" fill="white"/>' % (_WIDTH, _HEIGHT),
        '<text x="%d" y="24" font-size="14" font-family="sans-serif">%s</text>'
        % (_MARGIN, title),
    ]
    # axes
    parts.append(
        '<line x1="%g" y1="%g" x2="%g" y2="%g" stroke="black"/>'
        % (_MARGIN, _HEIGHT - _MARGIN, _WIDTH - _MARGIN, _HEIGHT - _MARGIN)
    )
    parts.append(
        '<line x1="%g" y1="%g" x2="%g" y2="%g" stroke="black"/>'
        % (_MARGIN, _MARGIN, _MARGIN, _HEIGHT - _MARGIN)
    )
    for x in _axis_ticks(x_lo, x_hi):
        parts.append(
            '<text x="%g" y="%g" font-size="10" font-family="sans-serif" '
            'text-anchor="middle">%.3g</text>' % (sx(x), _HEIGHT - _MARGIN + 16, x)
        )
    for y in _axis_ticks(y_lo, y_hi):
        parts.append(
            '<text x="%g" y="%g" font-size="10" font-family="sans-serif" '
            'text-anchor="end">%.3g</text>' % (_MARGIN - 6, sy(y) + 3, y)
        )
    parts.append(
        '<text x="%g" y="%g" font-size="11" font-family="sans-serif" '
        'text-anchor="middle">log|t|</text>'
        % ((_WIDTH) / 2, _HEIGHT - 12)
    )
    # envelope polylines
    for env, color in ((env_min, "#2060c0"), (env_max, "#c04020")):
        if len(env) > 1:
            path = " ".join("%g,%g" % p for p in env)
            parts.append(
                '<polyline points="%s" fill="none" stroke="%s" stroke-width="1.2"/>'
                % (path, color)
            )
    # scatter
    for x, y in pts:
        parts.append(
            '<circle cx="%g" cy="%g" r="2" fill="#404040" fill-opacity="0.6"/>'
            % (sx(x), sy(y))
        )
    parts.append("</svg>")
    return "\n".join(parts)
