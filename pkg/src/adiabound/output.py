"""CSV and SVG emitters. No plotting library involved."""
from __future__ import annotations

import csv
import math
from html import escape

import numpy as np


def fmt(x) -> str:
    """17 significant digits: re-parsing gives back the identical double."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "%.17g" % (float(x) + 0.0)  # folds -0 to 0


def write_csv(stream, header, rows) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])


def columns_to_rows(columns: dict):
    return zip(*columns.values())


def nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / target
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 5, 10) if m * mag >= raw)
    first = math.ceil(lo / step - 1e-9) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 12))
        t += step
    return ticks


class SvgPlot:
    """Fixed 800x600 canvas with linear axes."""

    WIDTH, HEIGHT = 800, 600
    LEFT, RIGHT, TOP, BOTTOM = 80, 30, 40, 60

    def __init__(self, xlim, ylim, title="", xlabel="", ylabel=""):
        self.xlim = (float(xlim[0]), float(xlim[1]))
        self.ylim = (float(ylim[0]), float(ylim[1]))
        self.title, self.xlabel, self.ylabel = title, xlabel, ylabel
        self.items: list[str] = []
        self.legend: list[tuple[str, str]] = []

    def _x(self, x):
        x0, x1 = self.xlim
        return self.LEFT + (np.asarray(x) - x0) / (x1 - x0) * (self.WIDTH - self.LEFT - self.RIGHT)

    def _y(self, y):
        y0, y1 = self.ylim
        return self.HEIGHT - self.BOTTOM - (np.asarray(y) - y0) / (y1 - y0) * (
            self.HEIGHT - self.TOP - self.BOTTOM)

    @staticmethod
    def _points(xs, ys) -> str:
        return " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys))

    def band(self, x, lower, upper, color, label, opacity=0.35):
        xs = np.concatenate([self._x(x), self._x(x)[::-1]])
        ys = np.concatenate([self._y(upper), self._y(lower)[::-1]])
        self.items.append(
            f'<polygon points="{self._points(xs, ys)}" fill="{color}" '
            f'fill-opacity="{opacity}" stroke="none"/>')
        self.legend.append((color, label))

    def line(self, x, y, color, label, dash=None, width=1.5):
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        self.items.append(
            f'<polyline points="{self._points(self._x(x), self._y(y))}" fill="none" '
            f'stroke="{color}" stroke-width="{width}"{extra}/>')
        self.legend.append((color, label))

    def _axes(self) -> list[str]:
        out = []
        x0p, x1p = self.LEFT, self.WIDTH - self.RIGHT
        y0p, y1p = self.HEIGHT - self.BOTTOM, self.TOP
        out.append(f'<rect x="{x0p}" y="{y1p}" width="{x1p - x0p}" height="{y0p - y1p}" '
                   'fill="none" stroke="black"/>')
        for t in nice_ticks(*self.xlim):
            px = float(self._x(t))
            out.append(f'<line x1="{px:.2f}" y1="{y0p}" x2="{px:.2f}" y2="{y0p + 6}" stroke="black"/>')
            out.append(f'<text x="{px:.2f}" y="{y0p + 22}" font-size="13" '
                       f'text-anchor="middle">{t:g}</text>')
        for t in nice_ticks(*self.ylim):
            py = float(self._y(t))
            out.append(f'<line x1="{x0p - 6}" y1="{py:.2f}" x2="{x0p}" y2="{py:.2f}" stroke="black"/>')
            out.append(f'<text x="{x0p - 10}" y="{py + 4:.2f}" font-size="13" '
                       f'text-anchor="end">{t:g}</text>')
        out.append(f'<text x="{(x0p + x1p) / 2}" y="{self.HEIGHT - 15}" font-size="15" '
                   f'text-anchor="middle">{escape(self.xlabel)}</text>')
        out.append(f'<text x="20" y="{(y0p + y1p) / 2}" font-size="15" text-anchor="middle" '
                   f'transform="rotate(-90 20 {(y0p + y1p) / 2})">{escape(self.ylabel)}</text>')
        out.append(f'<text x="{(x0p + x1p) / 2}" y="25" font-size="16" '
                   f'text-anchor="middle">{escape(self.title)}</text>')
        for i, (color, label) in enumerate(self.legend):
            y = y1p + 18 + 18 * i
            out.append(f'<rect x="{x1p - 170}" y="{y - 10}" width="14" height="10" fill="{color}"/>')
            out.append(f'<text x="{x1p - 150}" y="{y}" font-size="13">{escape(label)}</text>')
        return out

    def render(self) -> str:
        body = "\n".join(self.items + self._axes())
        return (
            f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {self.WIDTH} {self.HEIGHT}" '
            f'width="{self.WIDTH}" height="{self.HEIGHT}">\n'
            f'<rect width="100%" height="100%" fill="white"/>\n{body}\n</svg>\n'
        )

    def save(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.render())


BAND_COLORS = {"old": "#1f5fbf", "sin": "#2e9e44", "g": "#d62728"}


def bands_svg(trace, bands, title="") -> SvgPlot:
    plot = SvgPlot((trace.lambda_grid[0], trace.lambda_grid[-1]), (0.0, 1.0), title,
                   "lambda", "fidelity")
    for b in bands:
        plot.band(b.lambda_grid, b.lower, b.upper, BAND_COLORS[b.kind.value], f"{b.kind.value} bound")
    plot.line(trace.lambda_grid, trace.C, "black", "C")
    plot.line(trace.lambda_grid, trace.F, "#ff8c00", "F", dash="6,4")
    return plot


def curves_svg(trace, title="") -> SvgPlot:
    ymax = max(1.0, float(np.max(trace.R_tilde)))
    plot = SvgPlot((trace.lambda_grid[0], trace.lambda_grid[-1]), (0.0, ymax), title, "lambda", "")
    x = trace.lambda_grid
    plot.line(x, trace.R_tilde, BAND_COLORS["old"], "R~")
    plot.line(x, trace.sinR_tilde, BAND_COLORS["sin"], "sin R~")
    plot.line(x, trace.g, BAND_COLORS["g"], "g")
    plot.line(x, trace.g1, "#9467bd", "g1", dash="4,3")
    plot.line(x, trace.g2, "#8c564b", "g2", dash="2,2")
    plot.line(x, trace.C, "black", "C")
    return plot
