"""Tiny dependency-free SVG line charts.

Output is deterministic text: coordinates are rounded to two decimals and
element order follows the input order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f4e79", "#c0504d", "#4f8a3c", "#7f6084", "#d98c1f", "#333333")
DASHES = ("", "6,3", "2,2", "8,3,2,3", "1,3", "")


@dataclass
class Layer:
    x: np.ndarray
    y: np.ndarray
    label: str = ""
    kind: str = "line"  # line | points | bars | errorbars
    style: int = 0
    low: np.ndarray = None
    high: np.ndarray = None


@dataclass
class Panel:
    title: str = ""
    ylabel: str = ""
    layers: list = field(default_factory=list)
    ylim: tuple = None

    def line(self, x, y, label="", style=None):
        self.layers.append(Layer(np.asarray(x, float), np.asarray(y, float), label, "line", self._style(style)))
        return self

    def points(self, x, y, label="", style=None):
        self.layers.append(Layer(np.asarray(x, float), np.asarray(y, float), label, "points", self._style(style)))
        return self

    def bars(self, x, y, label="", style=None):
        self.layers.append(Layer(np.asarray(x, float), np.asarray(y, float), label, "bars", self._style(style)))
        return self

    def errorbars(self, x, y, low, high, label="", style=None):
        layer = Layer(np.asarray(x, float), np.asarray(y, float), label, "errorbars", self._style(style))
        layer.low = np.asarray(low, float)
        layer.high = np.asarray(high, float)
        self.layers.append(layer)
        return self

    def _style(self, style):
        return len(self.layers) if style is None else style


def _fmt(v):
    return f"{v:.2f}"


def _ticks(lo, hi, count=5):
    if not np.isfinite(lo) or not np.isfinite(hi) or hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** np.floor(np.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = np.ceil(lo / step) * step
    return [round(t, 10) for t in np.arange(start, hi + step * 1e-9, step)]


def render(panels, title="", width=900, panel_height=260):
    """Render stacked panels sharing an x axis; returns SVG text."""
    margin_l, margin_r, margin_t, gap = 70, 20, 40 if title else 15, 45
    height = margin_t + len(panels) * (panel_height + gap)
    xs = [l.x for p in panels for l in p.layers if l.x.size]
    xlo = min(float(np.nanmin(x)) for x in xs) if xs else 0.0
    xhi = max(float(np.nanmax(x)) for x in xs) if xs else 1.0
    if xhi == xlo:
        xhi = xlo + 1.0
    plot_w = width - margin_l - margin_r

    def sx(v):
        return margin_l + (v - xlo) / (xhi - xlo) * plot_w

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{width / 2}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>')
    for k, panel in enumerate(panels):
        top = margin_t + k * (panel_height + gap)
        ys = []
        for l in panel.layers:
            ys.append(l.y)
            if l.low is not None:
                ys += [l.low, l.high]
        if panel.ylim:
            ylo, yhi = panel.ylim
        else:
            finite = np.concatenate([v[np.isfinite(v)] for v in ys]) if ys else np.array([0.0, 1.0])
            ylo, yhi = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 1.0)
            if ylo == yhi:
                ylo, yhi = ylo - 0.5, yhi + 0.5
            pad = 0.05 * (yhi - ylo)
            ylo, yhi = ylo - pad, yhi + pad

        def sy(v, top=top, ylo=ylo, yhi=yhi):
            return top + panel_height - (v - ylo) / (yhi - ylo) * panel_height

        out.append(f'<g class="panel" id="panel{k}">')
        out.append(
            f'<rect x="{margin_l}" y="{top}" width="{plot_w}" height="{panel_height}" '
            'fill="none" stroke="#888"/>'
        )
        if panel.title:
            out.append(f'<text x="{margin_l}" y="{top - 6}">{escape(panel.title)}</text>')
        for t in _ticks(ylo, yhi):
            y = sy(t)
            out.append(f'<line x1="{margin_l - 4}" x2="{margin_l}" y1="{_fmt(y)}" y2="{_fmt(y)}" stroke="#888"/>')
            out.append(f'<text x="{margin_l - 6}" y="{_fmt(y + 4)}" text-anchor="end">{t:g}</text>')
        for t in _ticks(xlo, xhi, 8):
            x = sx(t)
            yb = top + panel_height
            out.append(f'<line x1="{_fmt(x)}" x2="{_fmt(x)}" y1="{yb}" y2="{yb + 4}" stroke="#888"/>')
            out.append(f'<text x="{_fmt(x)}" y="{yb + 16}" text-anchor="middle">{t:g}</text>')
        for layer in panel.layers:
            colour = PALETTE[layer.style % len(PALETTE)]
            ok = np.isfinite(layer.x) & np.isfinite(layer.y)
            if layer.kind == "line":
                dash = DASHES[layer.style % len(DASHES)]
                # break the polyline at gaps
                runs = np.split(np.arange(layer.x.size), np.nonzero(~ok)[0])
                for run in runs:
                    run = run[ok[run]]
                    if run.size < 2:
                        continue
                    pts = " ".join(f"{_fmt(sx(layer.x[i]))},{_fmt(sy(layer.y[i]))}" for i in run)
                    extra = f' stroke-dasharray="{dash}"' if dash else ""
                    out.append(f'<polyline class="series" fill="none" stroke="{colour}" stroke-width="1.2"{extra} points="{pts}"/>')
            elif layer.kind == "points":
                for i in np.nonzero(ok)[0]:
                    out.append(f'<circle cx="{_fmt(sx(layer.x[i]))}" cy="{_fmt(sy(layer.y[i]))}" r="1.6" fill="{colour}"/>')
            elif layer.kind == "bars":
                base = sy(max(ylo, 0.0))
                for i in np.nonzero(ok)[0]:
                    y = sy(layer.y[i])
                    out.append(
                        f'<line class="bar" x1="{_fmt(sx(layer.x[i]))}" x2="{_fmt(sx(layer.x[i]))}" '
                        f'y1="{_fmt(base)}" y2="{_fmt(y)}" stroke="{colour}"/>'
                    )
            elif layer.kind == "errorbars":
                for i in np.nonzero(ok)[0]:
                    x = _fmt(sx(layer.x[i]))
                    out.append(
                        f'<line x1="{x}" x2="{x}" y1="{_fmt(sy(layer.low[i]))}" '
                        f'y2="{_fmt(sy(layer.high[i]))}" stroke="{colour}"/>'
                    )
                    out.append(f'<circle cx="{x}" cy="{_fmt(sy(layer.y[i]))}" r="2.5" fill="{colour}"/>')
        labelled = [l for l in panel.layers if l.label]
        for j, layer in enumerate(labelled):
            colour = PALETTE[layer.style % len(PALETTE)]
            lx = margin_l + 10 + 150 * j
            out.append(f'<text x="{lx}" y="{top + 14}" fill="{colour}">{escape(layer.label)}</text>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
