"""Self-contained SVG 1.1 plots: moment scatters, bootstrap clouds, spectrogram heatmaps.

Output is a pure function of the inputs: coordinates are printed with fixed
precision and no timestamps or random ids are emitted. Each document carries
a ``<metadata>`` JSON block describing the data-to-pixel mapping of every
panel so that plotted positions can be checked programmatically.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

from .errors import ConfigInvalid, EmptyData
from .report import dumps

PLOT_KINDS = ("moments", "cloud", "heatmap")
# Blue (lowest) through cyan, green and yellow to red (highest).
_STOPS = np.array(
    [(0, 0, 255), (0, 255, 255), (0, 255, 0), (255, 255, 0), (255, 0, 0)], dtype=np.float64
)
_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")
_MARGIN = {"left": 70, "right": 20, "top": 40, "bottom": 55}


def _f(v: float) -> str:
    return f"{v:.2f}"


def colormap(t: float) -> str:
    """Hex colour for ``t`` in [0, 1] on the blue-to-red scale."""
    t = min(max(float(t), 0.0), 1.0) * (len(_STOPS) - 1)
    i = min(int(t), len(_STOPS) - 2)
    rgb = _STOPS[i] + (t - i) * (_STOPS[i + 1] - _STOPS[i])
    return "#%02x%02x%02x" % tuple(int(round(c)) for c in rgb)


def _nice_range(lo: float, hi: float) -> tuple[float, float]:
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise EmptyData("data range is not finite")
    if hi == lo:
        span = abs(lo) * 0.1 or 1.0
        return lo - span, hi + span
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


class _Axes:
    def __init__(self, x0, y0, w, h, xr, yr):
        self.x0, self.y0, self.w, self.h = x0, y0, w, h
        self.xr, self.yr = xr, yr

    def px(self, x):
        return self.x0 + (x - self.xr[0]) / (self.xr[1] - self.xr[0]) * self.w

    def py(self, y):
        return self.y0 + self.h - (y - self.yr[0]) / (self.yr[1] - self.yr[0]) * self.h

    def mapping(self) -> dict:
        return {
            "x": {"data": list(self.xr), "px": [self.x0, self.x0 + self.w]},
            "y": {"data": list(self.yr), "px": [self.y0 + self.h, self.y0]},
        }

    def frame(self, xlabel: str, ylabel: str, title: str | None = None) -> list[str]:
        parts = [
            f'<rect x="{_f(self.x0)}" y="{_f(self.y0)}" width="{_f(self.w)}" height="{_f(self.h)}" '
            'fill="none" stroke="#000000" stroke-width="1"/>'
        ]
        for i in range(5):
            fx = self.xr[0] + i * (self.xr[1] - self.xr[0]) / 4
            fy = self.yr[0] + i * (self.yr[1] - self.yr[0]) / 4
            x, y = self.px(fx), self.py(fy)
            bottom = self.y0 + self.h
            parts.append(f'<line x1="{_f(x)}" y1="{_f(bottom)}" x2="{_f(x)}" y2="{_f(bottom + 4)}" stroke="#000000"/>')
            parts.append(
                f'<text x="{_f(x)}" y="{_f(bottom + 16)}" font-size="10" text-anchor="middle">{fx:.4g}</text>'
            )
            parts.append(f'<line x1="{_f(self.x0 - 4)}" y1="{_f(y)}" x2="{_f(self.x0)}" y2="{_f(y)}" stroke="#000000"/>')
            parts.append(
                f'<text x="{_f(self.x0 - 6)}" y="{_f(y + 3)}" font-size="10" text-anchor="end">{fy:.4g}</text>'
            )
        cx = self.x0 + self.w / 2
        parts.append(
            f'<text x="{_f(cx)}" y="{_f(self.y0 + self.h + 36)}" font-size="12" text-anchor="middle">{escape(xlabel)}</text>'
        )
        cy = self.y0 + self.h / 2
        lx = self.x0 - 52
        parts.append(
            f'<text x="{_f(lx)}" y="{_f(cy)}" font-size="12" text-anchor="middle" '
            f'transform="rotate(-90 {_f(lx)} {_f(cy)})">{escape(ylabel)}</text>'
        )
        if title:
            parts.append(
                f'<text x="{_f(cx)}" y="{_f(self.y0 - 12)}" font-size="13" text-anchor="middle">{escape(title)}</text>'
            )
        return parts


def _document(width: int, height: int, body: list[str], meta: dict) -> bytes:
    head = (
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif">\n'
        f"<metadata>{escape(dumps(meta))}</metadata>\n"
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>\n'
    )
    return (head + "\n".join(body) + "\n</svg>\n").encode("utf-8")


def _scatter_panel(ax: _Axes, xs, ys, colors, radius=2.0) -> list[str]:
    out = []
    for x, y, c in zip(xs, ys, colors):
        out.append(f'<circle cx="{_f(ax.px(x))}" cy="{_f(ax.py(y))}" r="{radius:g}" fill="{c}" fill-opacity="0.6"/>')
    return out


def _cloud(data: dict, style: dict) -> bytes:
    pts = np.asarray(data.get("points", []), dtype=np.float64)
    if pts.size == 0:
        raise EmptyData("cloud has no points")
    if pts.ndim != 2 or pts.shape[1] not in (2, 3):
        raise ConfigInvalid("cloud points must be (n, 2) skewness/exkurtosis or (n, 3) std/skewness/exkurtosis")
    sk = pts[:, -2:]
    ref = data.get("reference")
    xs_all = list(sk[:, 0]) + ([ref[0]] if ref is not None else [])
    ys_all = list(sk[:, 1]) + ([ref[1]] if ref is not None else [])
    width, height = style.get("width", 640), style.get("height", 520)
    ax = _Axes(
        _MARGIN["left"],
        _MARGIN["top"],
        width - _MARGIN["left"] - _MARGIN["right"],
        height - _MARGIN["top"] - _MARGIN["bottom"],
        _nice_range(min(xs_all), max(xs_all)),
        _nice_range(min(ys_all), max(ys_all)),
    )
    body = ax.frame("skewness (dimensionless)", "excess kurtosis (dimensionless)", style.get("title"))
    body += _scatter_panel(ax, sk[:, 0], sk[:, 1], [_PALETTE[0]] * len(sk))
    centroid = data.get("centroid")
    if centroid is not None:
        cx, cy = ax.px(centroid[0]), ax.py(centroid[1])
        body.append(
            f'<g id="centroid"><rect x="{_f(cx - 4)}" y="{_f(cy - 4)}" width="8" height="8" '
            'fill="#000000"/></g>'
        )
    if ref is not None:
        rx, ry = ax.px(ref[0]), ax.py(ref[1])
        body.append(
            f'<g id="rest-reference"><circle cx="{_f(rx)}" cy="{_f(ry)}" r="7" fill="none" '
            f'stroke="#d62728" stroke-width="2"/><path d="M {_f(rx - 7)} {_f(ry)} L {_f(rx + 7)} {_f(ry)} '
            f'M {_f(rx)} {_f(ry - 7)} L {_f(rx)} {_f(ry + 7)}" stroke="#d62728" stroke-width="2"/></g>'
        )
    meta = {"plot": "cloud", "panels": [ax.mapping()], "source": style.get("metadata")}
    return _document(width, height, body, meta)


_UNITS = {"mean": "input units", "std": "input units", "skewness": "dimensionless", "exkurtosis": "dimensionless"}


def _axis_label(name: str) -> str:
    stat, _, channel = name.partition(":")
    unit = _UNITS.get(stat, "")
    if stat in ("mean", "std"):
        unit = "(m/s²)²" if channel == "mag2" else "m/s²"
    return f"{stat} of {channel} ({unit})" if channel else f"{stat} ({unit})"


def _moments(data: dict, style: dict) -> bytes:
    feats = np.asarray(data.get("features", []), dtype=np.float64)
    if feats.size == 0:
        raise EmptyData("no feature vectors to plot")
    names = list(data["names"])
    clusters = data.get("clusters")
    clusters = [0] * len(feats) if clusters is None else list(clusters)
    panels = data.get("panels") or [(names[0], names[1] if len(names) > 1 else names[0])]
    pw, ph = style.get("panel_width", 420), style.get("panel_height", 360)
    width = len(panels) * (pw + _MARGIN["left"] + _MARGIN["right"])
    height = ph + _MARGIN["top"] + _MARGIN["bottom"]
    colors = [_PALETTE[int(c) % len(_PALETTE)] for c in clusters]
    body: list[str] = []
    mappings = []
    for i, (xn, yn) in enumerate(panels):
        xi, yi = names.index(xn), names.index(yn)
        ax = _Axes(
            i * (pw + _MARGIN["left"] + _MARGIN["right"]) + _MARGIN["left"],
            _MARGIN["top"],
            pw,
            ph,
            _nice_range(feats[:, xi].min(), feats[:, xi].max()),
            _nice_range(feats[:, yi].min(), feats[:, yi].max()),
        )
        body += ax.frame(_axis_label(xn), _axis_label(yn), style.get("title"))
        body += _scatter_panel(ax, feats[:, xi], feats[:, yi], colors, radius=3.5)
        mappings.append(ax.mapping())
    meta = {"plot": "moments", "panels": mappings, "source": style.get("metadata")}
    return _document(width, height, body, meta)


def _reduce_rows(power: np.ndarray, freqs: np.ndarray, max_rows: int):
    if power.shape[1] <= max_rows:
        return power, freqs
    groups = np.array_split(np.arange(power.shape[1]), max_rows)
    reduced = np.stack([power[:, g].mean(axis=1) for g in groups], axis=1)
    return reduced, np.array([freqs[g[0]] for g in groups])


def _heatmap(data: dict, style: dict) -> bytes:
    power = np.asarray(data.get("power", []), dtype=np.float64)
    if power.size == 0 or power.ndim != 2:
        raise EmptyData("heatmap needs a non-empty frames x freqs matrix")
    times = np.asarray(data["times_ms"], dtype=np.float64) / 1000.0
    freqs = np.asarray(data["freqs_hz"], dtype=np.float64)
    fmax = style.get("fmax")
    if fmax is not None:
        keep = freqs <= fmax
        power, freqs = power[:, keep], freqs[keep]
        if power.size == 0:
            raise EmptyData("no frequency bins below fmax")
    power, freqs = _reduce_rows(power, freqs, int(style.get("max_rows", 256)))
    nt, nf = power.shape
    width, height = style.get("width", 720), style.get("height", 480)
    dt = float(times[1] - times[0]) if nt > 1 else float(data.get("frame_ms", 1000.0)) / 1000.0
    df = float(freqs[1] - freqs[0]) if nf > 1 else float(data.get("df", 1.0))
    ax = _Axes(
        _MARGIN["left"],
        _MARGIN["top"],
        width - _MARGIN["left"] - _MARGIN["right"],
        height - _MARGIN["top"] - _MARGIN["bottom"],
        (float(times[0]), float(times[-1] + dt)),
        (float(freqs[0]), float(freqs[-1] + df)),
    )
    positive = power[power > 0]
    if positive.size:
        lo, hi = math.log10(positive.min()), math.log10(positive.max())
        logp = np.log10(np.where(power > 0, power, positive.min()))
        scaled = (logp - lo) / (hi - lo) if hi > lo else np.zeros_like(logp)
    else:
        scaled = np.zeros_like(power)
    body = []
    cw = ax.w / nt
    ch = ax.h / nf
    for i in range(nt):
        x = ax.x0 + i * cw
        for j in range(nf):
            y = ax.y0 + ax.h - (j + 1) * ch
            body.append(
                f'<rect x="{_f(x)}" y="{_f(y)}" width="{_f(cw)}" height="{_f(ch)}" fill="{colormap(scaled[i, j])}"/>'
            )
    body += ax.frame("frame start (s)", "frequency (Hz)", style.get("title"))
    meta = {
        "plot": "heatmap",
        "panels": [ax.mapping()],
        "cells": [nt, nf],
        "color_scale": "log10 power, blue (lowest) to red (highest)",
        "source": style.get("metadata"),
    }
    return _document(width, height, body, meta)


def emit_svg(plot_kind: str, data: dict, style: dict | None = None) -> bytes:
    """Render ``data`` as an SVG document.

    ``plot_kind`` is ``"moments"`` (feature scatter panels coloured by
    cluster), ``"cloud"`` (bootstrap points with the rest reference marked)
    or ``"heatmap"`` (spectrogram power on a log colour scale).
    """
    style = dict(style or {})
    if plot_kind == "cloud":
        return _cloud(data, style)
    if plot_kind == "moments":
        return _moments(data, style)
    if plot_kind == "heatmap":
        return _heatmap(data, style)
    raise ConfigInvalid(f"plot kind must be one of {PLOT_KINDS}, got {plot_kind!r}")

