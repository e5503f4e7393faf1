"""Minimal, deterministic SVG line charts (no plotting library)."""
from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

_COLOURS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _ticks(lo, hi, count=5):
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((s * mag for s in (1, 2, 2.5, 5, 10) if s * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    return [start + i * step for i in range(int((hi - start) / step + 1e-9) + 1)]


def _fmt(v):
    return f"{v:.6g}"


def line_chart(path, series, *, title="", xlabel="", ylabel="", log_y=False, stems=False, width=720, height=400):
    """Write an SVG chart of ``series``, a list of ``(x, y, label)`` tuples.

    NaN y-values break the line. ``log_y`` plots ``log10(y)`` (non-positive
    values are dropped). ``stems`` draws vertical bars from zero instead of a
    polyline, as in a correlogram.
    """
    left, right, top, bottom = 70, 20, 40, 50
    pw, ph = width - left - right, height - top - bottom
    prepared = []
    for x, y, label in series:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if log_y:
            with np.errstate(divide="ignore", invalid="ignore"):
                y = np.where(y > 0, np.log10(y), np.nan)
        prepared.append((x, y, label))
    xs = np.concatenate([p[0] for p in prepared])
    ys = np.concatenate([p[1] for p in prepared])
    ys = ys[np.isfinite(ys)]
    x0, x1 = float(np.min(xs)), float(np.max(xs))
    y0, y1 = (float(ys.min()), float(ys.max())) if ys.size else (0.0, 1.0)
    if stems:
        y0, y1 = min(y0, 0.0), max(y1, 0.0)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5

    def sx(v):
        return left + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return top + (1 - (v - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="22" text-anchor="middle" font-family="sans-serif" font-size="14">{escape(title)}</text>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in _ticks(x0, x1):
        out.append(f'<line x1="{sx(t):.2f}" y1="{top + ph}" x2="{sx(t):.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(
            f'<text x="{sx(t):.2f}" y="{top + ph + 18}" text-anchor="middle" font-family="sans-serif" font-size="11">{_fmt(t)}</text>'
        )
    for t in _ticks(y0, y1):
        lab = _fmt(10**t) if log_y else _fmt(t)
        out.append(f'<line x1="{left - 5}" y1="{sy(t):.2f}" x2="{left}" y2="{sy(t):.2f}" stroke="black"/>')
        out.append(
            f'<text x="{left - 8}" y="{sy(t) + 4:.2f}" text-anchor="end" font-family="sans-serif" font-size="11">{lab}</text>'
        )
    out.append(
        f'<text x="{left + pw / 2:.1f}" y="{height - 10}" text-anchor="middle" font-family="sans-serif" font-size="12">{escape(xlabel)}</text>'
    )
    out.append(
        f'<text x="16" y="{top + ph / 2:.1f}" text-anchor="middle" font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 16 {top + ph / 2:.1f})">{escape(ylabel + (" (log10)" if log_y else ""))}</text>'
    )
    for i, (x, y, label) in enumerate(prepared):
        colour = _COLOURS[i % len(_COLOURS)]
        if stems:
            for xv, yv in zip(x, y):
                if np.isfinite(yv):
                    out.append(
                        f'<line x1="{sx(xv):.2f}" y1="{sy(0.0):.2f}" x2="{sx(xv):.2f}" y2="{sy(yv):.2f}" stroke="{colour}" stroke-width="2"/>'
                    )
        else:
            segment = []
            for xv, yv in zip(x, y):
                if np.isfinite(yv):
                    segment.append(f"{sx(xv):.2f},{sy(yv):.2f}")
                elif segment:
                    out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.2" points="{" ".join(segment)}"/>')
                    segment = []
            if segment:
                out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.2" points="{" ".join(segment)}"/>')
        if label:
            out.append(
                f'<text x="{left + pw - 8}" y="{top + 16 + 14 * i}" text-anchor="end" font-family="sans-serif" '
                f'font-size="11" fill="{colour}">{escape(label)}</text>'
            )
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")
