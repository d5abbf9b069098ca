"""Minimal deterministic SVG line plots.

Output depends only on the :class:`PlotSpec`: no timestamps, ids or
locale-dependent formatting, so identical specs give identical bytes.
Each series is drawn as exactly one ``<polyline>``; axes, ticks and legend
swatches use ``<line>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 720, 440
MARGIN = {"left": 70, "right": 20, "top": 40, "bottom": 55}
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


@dataclass(frozen=True)
class Series:
    name: str
    x: tuple
    y: tuple
    dashed: bool = False

    def __post_init__(self):
        x = tuple(float(v) for v in self.x)
        y = tuple(float(v) for v in self.y)
        if not x or len(x) != len(y):
            raise ValueError(f"series {self.name!r}: x and y must be non-empty and equal length")
        if any(b < a for a, b in zip(x, x[1:])):
            raise ValueError(f"series {self.name!r}: x must be ascending")
        if not all(map(math.isfinite, x + y)):
            raise ValueError(f"series {self.name!r}: non-finite coordinate")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)


@dataclass(frozen=True)
class PlotSpec:
    series: tuple
    x_label: str = ""
    y_label: str = ""
    title: str = ""
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.series:
            raise ValueError("a plot needs at least one series")
        object.__setattr__(self, "series", tuple(self.series))


def _nice_ticks(lo, hi, target=6):
    if hi == lo:
        lo, hi = lo - 0.5, hi + 0.5
    raw = (hi - lo) / target
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    start = math.floor(lo / step) * step
    stop = math.ceil(hi / step) * step
    ticks = [start + i * step for i in range(int(round((stop - start) / step)) + 1)]
    return ticks, step


def _fmt_tick(v, step):
    decimals = f"{step:.10f}".rstrip("0").split(".")[1]
    text = f"{v:.{len(decimals)}f}"
    return "0" if float(text) == 0 else text


def _c(v):
    return f"{v:.2f}"


def svg_document(spec: PlotSpec) -> str:
    xs = np.concatenate([s.x for s in spec.series])
    ys = np.concatenate([s.y for s in spec.series])
    xt, xstep = _nice_ticks(xs.min(), xs.max())
    yt, ystep = _nice_ticks(ys.min(), ys.max())
    x0, x1, y0, y1 = xt[0], xt[-1], yt[0], yt[-1]
    left, top = MARGIN["left"], MARGIN["top"]
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(v):
        return left + (v - x0) / (x1 - x0) * pw

    def py(v):
        return top + ph - (v - y0) / (y1 - y0) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if spec.title:
        out.append(f'<text x="{WIDTH / 2:.2f}" y="22" text-anchor="middle" font-size="14">{escape(spec.title)}</text>')

    out.append('<g stroke="#000000" stroke-width="1">')
    out.append(f'<line x1="{_c(left)}" y1="{_c(top + ph)}" x2="{_c(left + pw)}" y2="{_c(top + ph)}"/>')
    out.append(f'<line x1="{_c(left)}" y1="{_c(top)}" x2="{_c(left)}" y2="{_c(top + ph)}"/>')
    for t in xt:
        out.append(f'<line x1="{_c(px(t))}" y1="{_c(top + ph)}" x2="{_c(px(t))}" y2="{_c(top + ph + 5)}"/>')
    for t in yt:
        out.append(f'<line x1="{_c(left - 5)}" y1="{_c(py(t))}" x2="{_c(left)}" y2="{_c(py(t))}"/>')
    out.append("</g>")

    out.append('<g fill="#000000">')
    for t in xt:
        out.append(f'<text x="{_c(px(t))}" y="{_c(top + ph + 18)}" text-anchor="middle">{_fmt_tick(t, xstep)}</text>')
    for t in yt:
        out.append(f'<text x="{_c(left - 8)}" y="{_c(py(t) + 4)}" text-anchor="end">{_fmt_tick(t, ystep)}</text>')
    if spec.x_label:
        out.append(f'<text x="{_c(left + pw / 2)}" y="{HEIGHT - 12}" text-anchor="middle">{escape(spec.x_label)}</text>')
    if spec.y_label:
        out.append(f'<text x="16" y="{_c(top + ph / 2)}" text-anchor="middle" '
                   f'transform="rotate(-90 16 {_c(top + ph / 2)})">{escape(spec.y_label)}</text>')
    out.append("</g>")

    for i, s in enumerate(spec.series):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{_c(px(a))},{_c(py(b))}" for a, b in zip(s.x, s.y))
        dash = ' stroke-dasharray="6 4"' if s.dashed else ""
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{pts}"/>')

    lx, ly = left + pw - 170, top + 10
    out.append('<g class="legend" font-size="11">')
    for i, s in enumerate(spec.series):
        color = PALETTE[i % len(PALETTE)]
        y = ly + 16 * i
        dash = ' stroke-dasharray="6 4"' if s.dashed else ""
        out.append(f'<line x1="{_c(lx)}" y1="{_c(y)}" x2="{_c(lx + 24)}" y2="{_c(y)}" stroke="{color}" stroke-width="2"{dash}/>')
        out.append(f'<text x="{_c(lx + 30)}" y="{_c(y + 4)}">{escape(s.name)}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_line_plot(spec: PlotSpec, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(svg_document(spec), encoding="utf-8", newline="")
    return path
