"""Minimal SVG 1.1 charts: bar panels and line plots.

Output depends only on the input numbers, so re-rendering the same CSV
gives identical bytes.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

W, H = 640, 400
MARGIN = dict(left=70, right=20, top=40, bottom=50)
COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def _f(x: float) -> str:
    return "%.6g" % x


def _nice_ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        return [lo]
    step = 10 ** math.floor(math.log10((hi - lo) / n))
    for m in (1, 2, 5, 10):
        if (hi - lo) / (step * m) <= n:
            step *= m
            break
    start = math.ceil(lo / step) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 12))
        t += step
    return ticks


class _Panel:
    def __init__(self, x0, y0, w, h, xlim, ylim):
        self.x0, self.y0, self.w, self.h = x0, y0, w, h
        self.xlim, self.ylim = xlim, ylim

    def x(self, v):
        a, b = self.xlim
        return self.x0 + (v - a) / (b - a if b > a else 1.0) * self.w

    def y(self, v):
        a, b = self.ylim
        return self.y0 + self.h - (v - a) / (b - a if b > a else 1.0) * self.h

    def axes(self, xlabel, ylabel, title, xticks=True) -> list[str]:
        out = [
            f'<rect x="{_f(self.x0)}" y="{_f(self.y0)}" width="{_f(self.w)}" height="{_f(self.h)}" '
            'fill="none" stroke="#333" stroke-width="1"/>',
            f'<text x="{_f(self.x0 + self.w / 2)}" y="{_f(self.y0 - 12)}" text-anchor="middle" '
            f'font-size="13">{escape(title)}</text>',
            f'<text x="{_f(self.x0 + self.w / 2)}" y="{_f(self.y0 + self.h + 38)}" text-anchor="middle" '
            f'font-size="12">{escape(xlabel)}</text>',
            f'<text x="{_f(self.x0 - 52)}" y="{_f(self.y0 + self.h / 2)}" text-anchor="middle" font-size="12" '
            f'transform="rotate(-90 {_f(self.x0 - 52)} {_f(self.y0 + self.h / 2)})">{escape(ylabel)}</text>',
        ]
        for t in _nice_ticks(*self.ylim):
            yy = self.y(t)
            out.append(f'<line x1="{_f(self.x0 - 4)}" y1="{_f(yy)}" x2="{_f(self.x0)}" y2="{_f(yy)}" stroke="#333"/>')
            out.append(f'<text x="{_f(self.x0 - 6)}" y="{_f(yy + 4)}" text-anchor="end" font-size="10">{_f(t)}</text>')
        if xticks:
            for t in _nice_ticks(*self.xlim):
                xx = self.x(t)
                yb = self.y0 + self.h
                out.append(f'<line x1="{_f(xx)}" y1="{_f(yb)}" x2="{_f(xx)}" y2="{_f(yb + 4)}" stroke="#333"/>')
                out.append(f'<text x="{_f(xx)}" y="{_f(yb + 16)}" text-anchor="middle" font-size="10">{_f(t)}</text>')
        return out


def _document(body: list[str], width=W, height=H) -> str:
    head = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">\n'
        f'<rect width="{width}" height="{height}" fill="white"/>\n'
    )
    return head + "\n".join(body) + "\n</svg>\n"


def _limits(values, pad=0.05):
    finite = [v for v in values if math.isfinite(v)]
    if not finite:
        return (0.0, 1.0)
    lo, hi = min(finite), max(finite)
    if hi == lo:
        lo, hi = lo - 0.5, hi + 0.5
    span = hi - lo
    return (lo - pad * span, hi + pad * span)


def line_plot(series: dict[str, tuple[list[float], list[float]]], title: str, xlabel: str, ylabel: str) -> str:
    """One panel with a polyline per named series; non-finite points break lines."""
    xs = [x for xv, _ in series.values() for x in xv]
    ys = [y for _, yv in series.values() for y in yv]
    p = _Panel(MARGIN["left"], MARGIN["top"], W - MARGIN["left"] - MARGIN["right"] - 120,
               H - MARGIN["top"] - MARGIN["bottom"], _limits(xs, 0.0), _limits(ys))
    body = p.axes(xlabel, ylabel, title)
    for j, (name, (xv, yv)) in enumerate(series.items()):
        color = COLORS[j % len(COLORS)]
        runs, cur = [], []
        for x, y in zip(xv, yv):
            if math.isfinite(y):
                cur.append(f"{_f(p.x(x))},{_f(p.y(y))}")
            elif cur:
                runs.append(cur)
                cur = []
        if cur:
            runs.append(cur)
        for r in runs:
            body.append(f'<polyline points="{" ".join(r)}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        ly = MARGIN["top"] + 14 + 18 * j
        lx = p.x0 + p.w + 10
        body.append(f'<line x1="{_f(lx)}" y1="{_f(ly)}" x2="{_f(lx + 18)}" y2="{_f(ly)}" stroke="{color}" stroke-width="2"/>')
        body.append(f'<text x="{_f(lx + 22)}" y="{_f(ly + 4)}" font-size="11">{escape(name)}</text>')
    return _document(body)


def bar_panels(panels: list[tuple[str, list[float], float]], ylabel: str, title: str) -> str:
    """Side-by-side bar panels sharing a y axis; each has a dashed mean line.

    ``panels`` holds ``(panel title, bar heights, mean)`` triples.
    """
    allv = [v for _, vals, _ in panels for v in vals] + [0.0]
    ylim = (0.0, _limits(allv, 0.0)[1] * 1.05)
    width = 2 * W
    gap = 90
    pw = (width - MARGIN["left"] - MARGIN["right"] - gap * (len(panels) - 1)) / len(panels)
    body = [f'<text x="{_f(width / 2)}" y="18" text-anchor="middle" font-size="14">{escape(title)}</text>']
    for j, (ptitle, vals, mean) in enumerate(panels):
        x0 = MARGIN["left"] + j * (pw + gap)
        p = _Panel(x0, MARGIN["top"], pw, H - MARGIN["top"] - MARGIN["bottom"], (0.0, max(1, len(vals))), ylim)
        body += p.axes("medium index", ylabel, ptitle, xticks=False)
        bw = pw / max(1, len(vals))
        for i, v in enumerate(vals):
            if not math.isfinite(v):
                continue
            top = p.y(v)
            body.append(
                f'<rect x="{_f(p.x(i) + 0.1 * bw)}" y="{_f(top)}" width="{_f(0.8 * bw)}" '
                f'height="{_f(p.y0 + p.h - top)}" fill="{COLORS[0]}"/>'
            )
        if math.isfinite(mean):
            ym = p.y(mean)
            body.append(
                f'<line x1="{_f(p.x0)}" y1="{_f(ym)}" x2="{_f(p.x0 + p.w)}" y2="{_f(ym)}" '
                f'stroke="{COLORS[1]}" stroke-dasharray="6,4" stroke-width="1.5"/>'
            )
            body.append(f'<text x="{_f(p.x0 + p.w - 4)}" y="{_f(ym - 5)}" text-anchor="end" font-size="11" '
                        f'fill="{COLORS[1]}">mean {_f(mean)}</text>')
    return _document(body, width=width)
