"""Minimal SVG 1.1 polyline charts and rectangle heatmaps."""

import math
from xml.sax.saxutils import escape

import numpy as np

__all__ = ["line_chart", "heatmap", "diverging_color"]

WIDTH, HEIGHT = 640, 420
MARGIN = {"left": 70, "right": 150, "top": 40, "bottom": 55}
PALETTE = ("#d62728", "#1f77b4", "#222222", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
NAN_COLOR = "#bbbbbb"


def _fmt(x):
    return f"{x:.6g}"


def _header(title, width=WIDTH, height=HEIGHT):
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text class="title" x="{width / 2:.1f}" y="22" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{escape(title)}</text>',
    ]


def _axis_labels(xlabel, ylabel, x0, y0, x1, y1):
    return [
        f'<text class="xlabel" x="{(x0 + x1) / 2:.1f}" y="{y0 + 40:.1f}" '
        f'text-anchor="middle" font-family="sans-serif" font-size="12">{escape(xlabel)}</text>',
        f'<text class="ylabel" x="18" y="{(y0 + y1) / 2:.1f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 18 {(y0 + y1) / 2:.1f})">{escape(ylabel)}</text>',
    ]


def _range(values):
    finite = values[np.isfinite(values)]
    if finite.size == 0:
        return 0.0, 1.0
    lo, hi = float(finite.min()), float(finite.max())
    if lo == hi:
        pad = abs(lo) * 0.05 or 1.0
        lo, hi = lo - pad, hi + pad
    return lo, hi


def line_chart(x, series, xlabel="", ylabel="", title=""):
    """Polyline chart of several named series against a shared x axis.

    NaN values break a series into separate segments.
    """
    x = np.asarray(x, dtype=float)
    x0, x1 = MARGIN["left"], WIDTH - MARGIN["right"]
    y0, y1 = HEIGHT - MARGIN["bottom"], MARGIN["top"]
    xmin, xmax = _range(x)
    ys = {name: np.asarray(v, dtype=float) for name, v in series.items()}
    ymin, ymax = _range(np.concatenate(list(ys.values()))) if ys else (0.0, 1.0)

    def sx(v):
        return x0 + (v - xmin) / (xmax - xmin) * (x1 - x0)

    def sy(v):
        return y0 - (v - ymin) / (ymax - ymin) * (y0 - y1)

    out = _header(title)
    out.append(f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" '
               'fill="none" stroke="black"/>')
    for v, anchor, px, py in ((xmin, "start", x0, y0 + 16), (xmax, "end", x1, y0 + 16)):
        out.append(f'<text class="tick" x="{px}" y="{py}" text-anchor="{anchor}" '
                   f'font-family="sans-serif" font-size="10">{_fmt(v)}</text>')
    for v, py in ((ymin, y0), (ymax, y1 + 10)):
        out.append(f'<text class="tick" x="{x0 - 6}" y="{py}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="10">{_fmt(v)}</text>')
    for k, (name, y) in enumerate(ys.items()):
        color = PALETTE[k % len(PALETTE)]
        segment = []
        for xi, yi in zip(x, y):
            if math.isfinite(yi):
                segment.append(f"{sx(xi):.2f},{sy(yi):.2f}")
                continue
            if len(segment) > 1:
                out.append(f'<polyline class="series" fill="none" stroke="{color}" '
                           f'stroke-width="1.5" points="{" ".join(segment)}"/>')
            segment = []
        if len(segment) > 1:
            out.append(f'<polyline class="series" fill="none" stroke="{color}" '
                       f'stroke-width="1.5" points="{" ".join(segment)}"/>')
        ly = y1 + 14 + 18 * k
        out.append(f'<line x1="{x1 + 12}" y1="{ly - 4}" x2="{x1 + 36}" y2="{ly - 4}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text class="legend" x="{x1 + 42}" y="{ly}" font-family="sans-serif" '
                   f'font-size="11">{escape(name)}</text>')
    out += _axis_labels(xlabel, ylabel, x0, y0, x1, y1)
    out.append("</svg>")
    return "\n".join(out) + "\n"


def diverging_color(t):
    """Blue-white-red ramp for ``t`` in ``[-1, 1]``."""
    t = max(-1.0, min(1.0, t))
    if t >= 0:
        r, g, b = 255, int(round(255 * (1 - t))), int(round(255 * (1 - t)))
    else:
        r, g, b = int(round(255 * (1 + t))), int(round(255 * (1 + t))), 255
    return f"#{r:02x}{g:02x}{b:02x}"


def heatmap(xs, ys, z, xlabel="", ylabel="", title=""):
    """Heatmap with one ``<rect class="cell">`` per grid value.

    ``z`` has shape ``(len(xs), len(ys))``; the first axis runs horizontally.
    Colors are scaled symmetrically about zero by ``max |z|``.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    z = np.asarray(z, dtype=float).reshape(len(xs), len(ys))
    x0, x1 = MARGIN["left"], WIDTH - MARGIN["right"]
    y0, y1 = HEIGHT - MARGIN["bottom"], MARGIN["top"]
    cw = (x1 - x0) / len(xs)
    ch = (y0 - y1) / len(ys)
    finite = z[np.isfinite(z)]
    zmax = float(np.max(np.abs(finite))) if finite.size else 1.0
    zmax = zmax or 1.0
    out = _header(title)
    for i in range(len(xs)):
        for j in range(len(ys)):
            value = z[i, j]
            color = diverging_color(value / zmax) if math.isfinite(value) else NAN_COLOR
            out.append(f'<rect class="cell" x="{x0 + i * cw:.3f}" y="{y0 - (j + 1) * ch:.3f}" '
                       f'width="{cw:.3f}" height="{ch:.3f}" fill="{color}"/>')
    out.append(f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" '
               'fill="none" stroke="black"/>')
    for v, anchor, px in ((xs[0], "start", x0), (xs[-1], "end", x1)):
        out.append(f'<text class="tick" x="{px}" y="{y0 + 16}" text-anchor="{anchor}" '
                   f'font-family="sans-serif" font-size="10">{_fmt(v)}</text>')
    for v, py in ((ys[0], y0), (ys[-1], y1 + 10)):
        out.append(f'<text class="tick" x="{x0 - 6}" y="{py}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="10">{_fmt(v)}</text>')
    for k, (label, v) in enumerate((("max |z|", zmax), ("min", finite.min() if finite.size else 0),
                                    ("max", finite.max() if finite.size else 0))):
        out.append(f'<text class="legend" x="{x1 + 12}" y="{y1 + 14 + 18 * k}" '
                   f'font-family="sans-serif" font-size="11">{label} = {_fmt(float(v))}</text>')
    out += _axis_labels(xlabel, ylabel, x0, y0, x1, y1)
    out.append("</svg>")
    return "\n".join(out) + "\n"
