"""Minimal static SVG 1.1 line plots (at most two series)."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 80, 20, 40, 60
COLOURS = ("#1f77b4", "#d62728")


def _transform(values, log):
    if log:
        if any(v <= 0 for v in values):
            raise ValueError("log axis needs positive values")
        return [math.log10(v) for v in values]
    return list(values)


def _ticks(lo, hi, count=5):
    if hi == lo:
        hi = lo + 1.0
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def _label(v, log):
    return f"1e{v:.3g}" if log else f"{v:.4g}"


def line_plot(series, xlabel, ylabel, title="", logx=False, logy=False):
    """Return an SVG document plotting ``series`` = [(label, xs, ys), ...]."""
    if not 1 <= len(series) <= 2:
        raise ValueError("line_plot draws one or two series")
    xs_all, ys_all = [], []
    prepared = []
    for label, xs, ys in series:
        tx, ty = _transform(xs, logx), _transform(ys, logy)
        prepared.append((label, tx, ty))
        xs_all += tx
        ys_all += ty
    x0, x1 = min(xs_all), max(xs_all)
    y0, y1 = min(ys_all), max(ys_all)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def px(x):
        return LEFT + (x - x0) / (x1 - x0) * pw

    def py(y):
        return TOP + (1.0 - (y - y0) / (y1 - y0)) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in _ticks(x0, x1):
        out.append(f'<text x="{px(t):.2f}" y="{TOP + ph + 18}" font-size="11" '
                   f'text-anchor="middle">{escape(_label(t, logx))}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<text x="{LEFT - 6}" y="{py(t) + 4:.2f}" font-size="11" '
                   f'text-anchor="end">{escape(_label(t, logy))}</text>')
    out.append(f'<text x="{LEFT + pw / 2:.1f}" y="{HEIGHT - 15}" font-size="13" '
               f'text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="18" y="{TOP + ph / 2:.1f}" font-size="13" text-anchor="middle" '
               f'transform="rotate(-90 18 {TOP + ph / 2:.1f})">{escape(ylabel)}</text>')
    if title:
        out.append(f'<text x="{WIDTH / 2:.1f}" y="24" font-size="14" '
                   f'text-anchor="middle">{escape(title)}</text>')
    for i, (label, tx, ty) in enumerate(prepared):
        points = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(tx, ty))
        out.append(f'<polyline fill="none" stroke="{COLOURS[i]}" stroke-width="1.5" points="{points}"/>')
        out.append(f'<text x="{LEFT + pw - 8}" y="{TOP + 16 + 16 * i}" font-size="12" '
                   f'text-anchor="end" fill="{COLOURS[i]}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
