"""Minimal deterministic SVG line plots (axes, ticks, legend, optional log-x)."""

from __future__ import annotations

import math
from html import escape

import numpy as np

WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=70, right=150, top=40, bottom=55)
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
DASHES = ("", "6,3", "2,2", "8,3,2,3", "", "4,4")


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _nice_ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((s * mag for s in (1, 2, 5, 10) if s * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    ticks = []
    t = start
    while t <= hi + 1e-12 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


def _tick_label(v: float) -> str:
    if v == 0:
        return "0"
    if abs(v) >= 1e4 or abs(v) < 1e-3:
        return f"{v:.0e}"
    return f"{v:.4g}"


def line_plot(series, *, title: str = "", xlabel: str = "", ylabel: str = "",
              logx: bool = False) -> str:
    """Render ``series`` (an ordered mapping ``label -> (x, y)``) as SVG text.

    Non-finite points are dropped. The output depends only on the inputs.
    """
    items = [(str(k), np.asarray(x, dtype=float), np.asarray(y, dtype=float))
             for k, (x, y) in series.items()]
    xs = np.concatenate([x[np.isfinite(x) & np.isfinite(y)] for _, x, y in items] or [np.zeros(1)])
    ys = np.concatenate([y[np.isfinite(x) & np.isfinite(y)] for _, x, y in items] or [np.zeros(1)])
    if logx:
        xs = xs[xs > 0]
    if xs.size == 0:
        xs = np.array([1.0])
    if ys.size == 0:
        ys = np.array([0.0])

    def tx(v):
        return np.log10(v) if logx else v

    x0, x1 = float(tx(xs.min())), float(tx(xs.max()))
    y0, y1 = float(ys.min()), float(ys.max())
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(v):
        return MARGIN["left"] + (tx(v) - x0) / (x1 - x0) * pw

    def py(v):
        return MARGIN["top"] + (y1 - v) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
           f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
           f'<rect x="{MARGIN["left"]}" y="{MARGIN["top"]}" width="{pw}" height="{ph}" '
           'fill="none" stroke="black"/>']
    if title:
        out.append(f'<text x="{MARGIN["left"] + pw / 2:.2f}" y="22" text-anchor="middle" '
                   f'font-size="14">{escape(title)}</text>')
    # x ticks
    if logx:
        xticks = [10.0 ** k for k in range(math.ceil(x0 - 1e-12), math.floor(x1 + 1e-12) + 1)]
    else:
        xticks = _nice_ticks(x0, x1)
    for t in xticks:
        X = px(t)
        out.append(f'<line x1="{_fmt(X)}" y1="{MARGIN["top"] + ph}" x2="{_fmt(X)}" '
                   f'y2="{MARGIN["top"] + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{_fmt(X)}" y="{MARGIN["top"] + ph + 18}" '
                   f'text-anchor="middle">{escape(_tick_label(t))}</text>')
    for t in _nice_ticks(y0, y1):
        Y = py(t)
        out.append(f'<line x1="{MARGIN["left"] - 5}" y1="{_fmt(Y)}" x2="{MARGIN["left"]}" '
                   f'y2="{_fmt(Y)}" stroke="black"/>')
        out.append(f'<text x="{MARGIN["left"] - 8}" y="{_fmt(Y + 4)}" '
                   f'text-anchor="end">{escape(_tick_label(t))}</text>')
    if xlabel:
        out.append(f'<text x="{MARGIN["left"] + pw / 2:.2f}" y="{HEIGHT - 12}" '
                   f'text-anchor="middle">{escape(xlabel)}</text>')
    if ylabel:
        cy = MARGIN["top"] + ph / 2
        out.append(f'<text x="16" y="{cy:.2f}" text-anchor="middle" '
                   f'transform="rotate(-90 16 {cy:.2f})">{escape(ylabel)}</text>')
    for i, (label, x, y) in enumerate(items):
        ok = np.isfinite(x) & np.isfinite(y)
        if logx:
            ok &= x > 0
        pts = " ".join(f"{_fmt(px(a))},{_fmt(py(b))}" for a, b in zip(x[ok], y[ok]))
        color, dash = COLORS[i % len(COLORS)], DASHES[i % len(DASHES)]
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.6"{dash_attr} '
                   f'points="{pts}"/>')
        ly = MARGIN["top"] + 14 + 18 * i
        lx = MARGIN["left"] + pw + 12
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 24}" y2="{ly}" stroke="{color}" '
                   f'stroke-width="1.6"{dash_attr}/>')
        out.append(f'<text x="{lx + 30}" y="{ly + 4}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
