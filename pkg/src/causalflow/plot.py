"""Minimal hand-written SVG line charts."""

import math
from xml.sax.saxutils import escape

import numpy as np

__all__ = ["line_chart"]

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
           "#e377c2", "#17becf", "#7f7f7f", "#bcbd22", "#000000")


def _nice_range(lo, hi):
    if not (math.isfinite(lo) and math.isfinite(hi)):
        return 0.0, 1.0
    if hi <= lo:
        pad = abs(lo) * 0.1 or 1.0
        return lo - pad, hi + pad
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def line_chart(x, series, title="", x_label="tau", y_label="nats", log_x=False,
               y_range=None, width=720, height=440):
    """One ``<polyline>`` per entry of ``series`` (name -> y values) plus a legend.

    Non-finite points are dropped from their polyline. Values outside
    ``y_range`` are clipped to the plotting area.
    """
    x = np.asarray(x, dtype=float)
    if log_x and np.any(x <= 0):
        raise ValueError("log x axis needs positive abscissae")
    xt = np.log10(x) if log_x else x
    left, right, top, bottom = 70.0, 150.0, 40.0, 55.0
    pw, ph = width - left - right, height - top - bottom
    x0, x1 = (float(xt.min()), float(xt.max())) if xt.size else (0.0, 1.0)
    if x1 <= x0:
        x1 = x0 + 1.0
    if y_range is None:
        finite = np.concatenate([np.asarray(v, float)[np.isfinite(v)] for v in series.values()] or [np.array([])])
        y_range = _nice_range(float(finite.min()), float(finite.max())) if finite.size else (0.0, 1.0)
    y0, y1 = y_range

    def px(v):
        return left + (v - x0) / (x1 - x0) * pw

    def py(v):
        return top + (1.0 - (v - y0) / (y1 - y0)) * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<defs><clipPath id="plot-area"><rect x="{left:.3f}" y="{top:.3f}" '
        f'width="{pw:.3f}" height="{ph:.3f}"/></clipPath></defs>',
        f'<rect x="{left:.3f}" y="{top:.3f}" width="{pw:.3f}" height="{ph:.3f}" '
        f'fill="none" stroke="#444"/>',
    ]
    if title:
        parts.append(f'<text x="{width / 2:.3f}" y="22.000" text-anchor="middle" '
                     f'font-size="14">{escape(title)}</text>')
    for i in range(5):
        fx = x0 + (x1 - x0) * i / 4
        label = f"{10 ** fx:.3g}" if log_x else f"{fx:.3g}"
        parts.append(f'<text x="{px(fx):.3f}" y="{top + ph + 18:.3f}" '
                     f'text-anchor="middle">{label}</text>')
        fy = y0 + (y1 - y0) * i / 4
        parts.append(f'<text x="{left - 6:.3f}" y="{py(fy) + 4:.3f}" '
                     f'text-anchor="end">{fy:.3g}</text>')
    if y0 < 0 < y1:
        parts.append(f'<line x1="{left:.3f}" y1="{py(0):.3f}" x2="{left + pw:.3f}" '
                     f'y2="{py(0):.3f}" stroke="#bbb" stroke-dasharray="4 3"/>')
    parts.append(f'<text x="{left + pw / 2:.3f}" y="{height - 12:.3f}" '
                 f'text-anchor="middle">{escape(x_label)}</text>')
    parts.append(f'<text x="18.000" y="{top + ph / 2:.3f}" text-anchor="middle" '
                 f'transform="rotate(-90 18.000 {top + ph / 2:.3f})">{escape(y_label)}</text>')
    for k, (name, values) in enumerate(series.items()):
        color = _COLORS[k % len(_COLORS)]
        values = np.asarray(values, dtype=float)
        ok = np.isfinite(values) & np.isfinite(xt)
        pts = " ".join(f"{px(a):.3f},{py(b):.3f}" for a, b in zip(xt[ok], values[ok]))
        parts.append(f'<polyline data-name="{escape(name)}" points="{pts}" fill="none" '
                     f'stroke="{color}" stroke-width="1.5" clip-path="url(#plot-area)"/>')
        ly = top + 14 + 18 * k
        lx = left + pw + 12
        parts.append(f'<line x1="{lx:.3f}" y1="{ly:.3f}" x2="{lx + 22:.3f}" y2="{ly:.3f}" '
                     f'stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{lx + 28:.3f}" y="{ly + 4:.3f}">{escape(name)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
