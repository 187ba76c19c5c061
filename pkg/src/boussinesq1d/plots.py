"""Minimal line plots written as SVG markup, no plotting library needed."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#17becf", "#bcbd22")


@dataclass
class Series:
    x: Sequence[float]
    y: Sequence[float]
    label: str
    dashed: bool = False
    markers: bool = False


@dataclass
class Figure:
    title: str
    xlabel: str
    ylabel: str
    logy: bool = False
    series: list[Series] = field(default_factory=list)
    width: int = 640
    height: int = 420

    def add(self, x, y, label, **kw) -> "Figure":
        self.series.append(Series(list(map(float, x)), list(map(float, y)), label, **kw))
        return self

    def _points(self):
        for s in self.series:
            x = np.asarray(s.x, dtype=float)
            y = np.asarray(s.y, dtype=float)
            ok = np.isfinite(x) & np.isfinite(y)
            if self.logy:
                ok &= y > 0
            yield s, x[ok], (np.log10(y[ok]) if self.logy else y[ok])

    def to_svg(self) -> str:
        W, H = self.width, self.height
        left, right, top, bottom = 70, 150, 36, 50
        pts = list(self._points())
        xs = np.concatenate([p[1] for p in pts]) if pts else np.array([])
        ys = np.concatenate([p[2] for p in pts]) if pts else np.array([])
        x0, x1 = _span(xs)
        y0, y1 = _span(ys)
        sx = lambda v: left + (v - x0) / (x1 - x0) * (W - left - right)
        sy = lambda v: H - bottom - (v - y0) / (y1 - y0) * (H - top - bottom)
        out = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">',
            f'<rect width="{W}" height="{H}" fill="white"/>',
            f'<text x="{W / 2:.1f}" y="20" text-anchor="middle" font-size="14">{escape(self.title)}</text>',
            f'<rect x="{left}" y="{top}" width="{W - left - right}" height="{H - top - bottom}" fill="none" stroke="black"/>',
        ]
        for v in np.linspace(x0, x1, 5):
            out.append(f'<text x="{sx(v):.1f}" y="{H - bottom + 15}" text-anchor="middle">{_fmt(v)}</text>')
        for v in np.linspace(y0, y1, 5):
            txt = f"1e{v:.1f}" if self.logy else _fmt(v)
            out.append(f'<text x="{left - 5}" y="{sy(v) + 4:.1f}" text-anchor="end">{txt}</text>')
        out.append(f'<text x="{left + (W - left - right) / 2:.1f}" y="{H - 12}" text-anchor="middle">{escape(self.xlabel)}</text>')
        ylab = self.ylabel + (" (log scale)" if self.logy else "")
        out.append(f'<text x="16" y="{top + (H - top - bottom) / 2:.1f}" text-anchor="middle" transform="rotate(-90 16 {top + (H - top - bottom) / 2:.1f})">{escape(ylab)}</text>')
        for i, (s, x, y) in enumerate(pts):
            color = PALETTE[i % len(PALETTE)]
            dash = ' stroke-dasharray="6 4"' if s.dashed else ""
            if x.size > 1:
                path = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y))
                out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{path}"/>')
            if s.markers or x.size == 1:
                out.extend(f'<circle cx="{sx(a):.2f}" cy="{sy(b):.2f}" r="2.5" fill="{color}"/>' for a, b in zip(x, y))
            ly = top + 14 * (i + 1)
            out.append(f'<line x1="{W - right + 8}" y1="{ly - 4}" x2="{W - right + 28}" y2="{ly - 4}" stroke="{color}" stroke-width="2"{dash}/>')
            out.append(f'<text x="{W - right + 32}" y="{ly}">{escape(s.label)}</text>')
        out.append("</svg>")
        return "\n".join(out) + "\n"

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_svg())


def _span(v: np.ndarray) -> tuple[float, float]:
    if v.size == 0:
        return 0.0, 1.0
    lo, hi = float(v.min()), float(v.max())
    if hi - lo < 1e-12 * max(1.0, abs(hi)):
        pad = 0.5 * max(1.0, abs(hi))
        return lo - pad, hi + pad
    pad = 0.04 * (hi - lo)
    return lo - pad, hi + pad


def _fmt(v: float) -> str:
    if v == 0 or 1e-3 <= abs(v) < 1e4:
        return f"{v:.4g}"
    return f"{v:.2e}"


def sup_omega_figure(t, sup_omega, flag_time=None) -> Figure:
    fig = Figure("sup |omega| along the run", "t", "sup |omega|", logy=True)
    fig.add(t, sup_omega, "sup |omega|")
    if flag_time is not None:
        lo = max(min(v for v in sup_omega if v > 0), 1e-300) if any(v > 0 for v in sup_omega) else 1.0
        fig.add([flag_time, flag_time], [lo, max(sup_omega) if max(sup_omega) > 0 else 1.0], "flag", dashed=True)
    return fig


def characteristics_figure(t, Phi) -> Figure:
    fig = Figure("tracked characteristics Phi_n(t)", "t", "Phi_n", logy=True)
    for n, row in enumerate(Phi, start=1):
        fig.add(t, row, f"n = {n}")
    return fig


def psi_figure(t, psi, t_sched) -> Figure:
    fig = Figure("psi_n(t) = -ln Phi_n(t)", "t", "psi_n")
    for n, row in enumerate(psi, start=1):
        fig.add(t, row, f"n = {n}")
    t = np.asarray(t, dtype=float)
    sched = [(s, 3 * n + 6) for n, s in enumerate(t_sched, start=1) if t.size and s <= t[-1]]
    if sched:
        fig.add([s for s, _ in sched], [v for _, v in sched], "3n+6 at t_n", markers=True, dashed=True)
    return fig


def recursion_figure(n, a, saturation: float) -> Figure:
    fig = Figure("a_n against 3n+6", "n", "value", logy=True)
    fig.add(n, [min(v, saturation) for v in a], f"a_n (capped at {saturation:g})", markers=True)
    fig.add(n, [3 * k + 6 for k in n], "3n+6", dashed=True)
    return fig
