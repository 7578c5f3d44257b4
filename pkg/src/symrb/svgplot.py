"""Minimal self-contained SVG line/scatter plots (no plotting dependencies).

Output is deterministic for fixed inputs: no timestamps, no random ids.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

WIDTH, HEIGHT = 640, 420
MARGIN = {"left": 70, "right": 20, "top": 30, "bottom": 50}
PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
           "#8c564b", "#e377c2", "#17becf"]


@dataclass
class Series:
    x: np.ndarray
    y: np.ndarray
    label: str = ""
    color: str | None = None
    marker: bool = False        # scatter points instead of a line
    dashed: bool = False


def _ticks(lo: float, hi: float, n: int = 6) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(n - 1, 1)
    mag = 10.0 ** np.floor(np.log10(raw))
    step = min(s for s in (1 * mag, 2 * mag, 5 * mag, 10 * mag) if s >= raw)
    start = np.ceil(lo / step) * step
    return [float(t) for t in np.arange(start, hi + step / 2, step)]


def _fmt(v: float) -> str:
    if v == 0:
        return "0"
    if abs(v) >= 1e4 or abs(v) < 1e-3:
        return f"{v:.1e}"
    return f"{v:.6g}"


def render_plot(series: list[Series], title: str = "", xlabel: str = "",
                ylabel: str = "", ylim: tuple[float, float] | None = None) -> str:
    xs = np.concatenate([np.asarray(s.x, dtype=float) for s in series])
    ys = np.concatenate([np.asarray(s.y, dtype=float) for s in series])
    x0, x1 = float(xs.min()), float(xs.max())
    if ylim is None:
        y0, y1 = float(ys.min()), float(ys.max())
        pad = 0.05 * (y1 - y0 or 1.0)
        y0, y1 = y0 - pad, y1 + pad
    else:
        y0, y1 = ylim
    if x1 == x0:
        x1 = x0 + 1.0
    plot_w = WIDTH - MARGIN["left"] - MARGIN["right"]
    plot_h = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(x):
        return MARGIN["left"] + (x - x0) / (x1 - x0) * plot_w

    def py(y):
        return MARGIN["top"] + (y1 - y) / (y1 - y0) * plot_h

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
           f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
           f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>']
    out.append(
        f'<rect x="{MARGIN["left"]}" y="{MARGIN["top"]}" width="{plot_w}" '
        f'height="{plot_h}" fill="none" stroke="#333" stroke-width="1"/>')
    for t in _ticks(x0, x1):
        if not x0 <= t <= x1:
            continue
        X = px(t)
        out.append(f'<line x1="{X:.1f}" y1="{py(y0):.1f}" x2="{X:.1f}" '
                   f'y2="{py(y0) + 5:.1f}" stroke="#333"/>')
        out.append(f'<text x="{X:.1f}" y="{py(y0) + 18:.1f}" font-size="11" '
                   f'text-anchor="middle">{_fmt(t)}</text>')
    for t in _ticks(y0, y1):
        if not y0 <= t <= y1:
            continue
        Y = py(t)
        out.append(f'<line x1="{MARGIN["left"] - 5}" y1="{Y:.1f}" '
                   f'x2="{MARGIN["left"]}" y2="{Y:.1f}" stroke="#333"/>')
        out.append(f'<text x="{MARGIN["left"] - 8}" y="{Y + 4:.1f}" '
                   f'font-size="11" text-anchor="end">{_fmt(t)}</text>')
    if title:
        out.append(f'<text x="{WIDTH / 2}" y="18" font-size="14" '
                   f'text-anchor="middle">{title}</text>')
    if xlabel:
        out.append(f'<text x="{WIDTH / 2}" y="{HEIGHT - 10}" font-size="12" '
                   f'text-anchor="middle">{xlabel}</text>')
    if ylabel:
        out.append(f'<text x="16" y="{HEIGHT / 2}" font-size="12" '
                   f'text-anchor="middle" transform="rotate(-90 16 {HEIGHT / 2})">'
                   f'{ylabel}</text>')
    legend_y = MARGIN["top"] + 14
    for i, s in enumerate(series):
        color = s.color or PALETTE[i % len(PALETTE)]
        pts = [(px(float(a)), py(float(min(max(b, y0), y1))))
               for a, b in zip(s.x, s.y)]
        if s.marker:
            for X, Y in pts:
                out.append(f'<circle cx="{X:.1f}" cy="{Y:.1f}" r="2.5" '
                           f'fill="{color}"/>')
        else:
            d = " ".join(f"{'M' if j == 0 else 'L'}{X:.1f},{Y:.1f}"
                         for j, (X, Y) in enumerate(pts))
            dash = ' stroke-dasharray="6,4"' if s.dashed else ""
            out.append(f'<path d="{d}" fill="none" stroke="{color}" '
                       f'stroke-width="1.5"{dash}/>')
        if s.label:
            lx = WIDTH - MARGIN["right"] - 150
            out.append(f'<line x1="{lx}" y1="{legend_y - 4}" x2="{lx + 22}" '
                       f'y2="{legend_y - 4}" stroke="{color}" stroke-width="2"/>')
            out.append(f'<text x="{lx + 28}" y="{legend_y}" font-size="11">'
                       f'{s.label}</text>')
            legend_y += 16
    out.append("</svg>")
    return "\n".join(out)
