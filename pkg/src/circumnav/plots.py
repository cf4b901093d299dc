"""Self-contained SVG line plots (one 800x600 panel per file)."""
from __future__ import annotations

import math
from html import escape

import numpy as np

W, H = 800, 600
LEFT, RIGHT, TOP, BOTTOM = 80, 30, 50, 60
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")
MAX_POINTS = 2000


def _ticks(lo, hi, count=5):
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    out = []
    v = start
    while v <= hi + 1e-12 * abs(hi):
        out.append(0.0 if abs(v) < step * 1e-9 else v)
        v += step
    return out


def _range(arrays, equal=False):
    finite = [a[np.isfinite(a)] for a in arrays]
    finite = [a for a in finite if a.size]
    if not finite:
        return 0.0, 1.0
    lo = min(float(a.min()) for a in finite)
    hi = max(float(a.max()) for a in finite)
    if hi - lo < 1e-12:
        pad = max(abs(lo) * 0.05, 1e-6)
        return lo - pad, hi + pad
    pad = 0.04 * (hi - lo)
    return lo - pad, hi + pad


def _thin(x, y):
    if len(x) <= MAX_POINTS:
        return x, y
    idx = np.linspace(0, len(x) - 1, MAX_POINTS).round().astype(int)
    return x[idx], y[idx]


class Panel:
    def __init__(self, title, xlabel, ylabel, xlim, ylim):
        self.title, self.xlabel, self.ylabel = title, xlabel, ylabel
        self.x0, self.x1 = xlim
        self.y0, self.y1 = ylim
        self.body: list[str] = []
        self.legend: list[tuple[str, str]] = []

    def sx(self, x):
        return LEFT + (x - self.x0) / (self.x1 - self.x0) * (W - LEFT - RIGHT)

    def sy(self, y):
        return H - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (H - TOP - BOTTOM)

    def line(self, x, y, color, label=None, width=1.5, dash=None):
        x, y = _thin(np.asarray(x, float), np.asarray(y, float))
        pts = " ".join(f"{self.sx(a):.2f},{self.sy(b):.2f}" for a, b in zip(x, y)
                       if math.isfinite(a) and math.isfinite(b))
        style = f' stroke-dasharray="{dash}"' if dash else ""
        self.body.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                         f'stroke-width="{width}"{style}/>')
        if label:
            self.legend.append((label, color))

    def circle(self, cx, cy, r, color, dash=None):
        px_r = r / (self.x1 - self.x0) * (W - LEFT - RIGHT)
        py_r = r / (self.y1 - self.y0) * (H - TOP - BOTTOM)
        style = f' stroke-dasharray="{dash}"' if dash else ""
        self.body.append(f'<ellipse cx="{self.sx(cx):.2f}" cy="{self.sy(cy):.2f}" rx="{px_r:.2f}" '
                         f'ry="{py_r:.2f}" fill="none" stroke="{color}" stroke-width="1"{style}/>')

    def dot(self, x, y, color):
        self.body.append(f'<circle cx="{self.sx(x):.2f}" cy="{self.sy(y):.2f}" r="3.5" fill="{color}"/>')

    def render(self) -> str:
        out = [f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {W} {H}" width="{W}" height="{H}" '
               'font-family="sans-serif" font-size="13">',
               f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
               f'<text x="{W / 2}" y="28" text-anchor="middle" font-size="17">{escape(self.title)}</text>']
        for v in _ticks(self.x0, self.x1):
            x = self.sx(v)
            out.append(f'<line x1="{x:.2f}" y1="{TOP}" x2="{x:.2f}" y2="{H - BOTTOM}" stroke="#e5e5e5"/>')
            out.append(f'<text x="{x:.2f}" y="{H - BOTTOM + 18}" text-anchor="middle">{v:g}</text>')
        for v in _ticks(self.y0, self.y1):
            y = self.sy(v)
            out.append(f'<line x1="{LEFT}" y1="{y:.2f}" x2="{W - RIGHT}" y2="{y:.2f}" stroke="#e5e5e5"/>')
            out.append(f'<text x="{LEFT - 6}" y="{y + 4:.2f}" text-anchor="end">{v:g}</text>')
        out.append(f'<rect x="{LEFT}" y="{TOP}" width="{W - LEFT - RIGHT}" height="{H - TOP - BOTTOM}" '
                   'fill="none" stroke="black"/>')
        out.append(f'<text x="{W / 2}" y="{H - 15}" text-anchor="middle">{escape(self.xlabel)}</text>')
        out.append(f'<text x="18" y="{H / 2}" text-anchor="middle" '
                   f'transform="rotate(-90 18 {H / 2})">{escape(self.ylabel)}</text>')
        out.append(f'<clipPath id="plot"><rect x="{LEFT}" y="{TOP}" width="{W - LEFT - RIGHT}" '
                   f'height="{H - TOP - BOTTOM}"/></clipPath><g clip-path="url(#plot)">')
        out += self.body
        out.append("</g>")
        for k, (label, color) in enumerate(self.legend):
            y = TOP + 18 + 18 * k
            out.append(f'<line x1="{W - RIGHT - 150}" y1="{y - 4}" x2="{W - RIGHT - 125}" y2="{y - 4}" '
                       f'stroke="{color}" stroke-width="2"/>')
            out.append(f'<text x="{W - RIGHT - 120}" y="{y}">{escape(label)}</text>')
        out.append("</svg>")
        return "\n".join(out) + "\n"


def series_panel(title, ylabel, t, series, xlabel="t") -> str:
    """``series`` is a list of ``(label, values)`` pairs sharing the time axis ``t``."""
    t = np.asarray(t, float)
    xlim = (float(t[0]), float(t[-1])) if len(t) > 1 and t[-1] > t[0] else (0.0, 1.0)
    panel = Panel(title, xlabel, ylabel, xlim, _range([np.asarray(v, float) for _, v in series]))
    for k, (label, values) in enumerate(series):
        panel.line(t, values, COLORS[k % len(COLORS)], label, dash="6 4" if k else None)
    return panel.render()


def path_panel(simlog, snapshots: int = 4) -> str:
    """Top-down view: agent paths plus the true and estimated circles at a few times."""
    xs = [simlog.px.ravel(), simlog.truth[:, 0] - simlog.truth[:, 2], simlog.truth[:, 0] + simlog.truth[:, 2]]
    ys = [simlog.py.ravel(), simlog.truth[:, 1] - simlog.truth[:, 2], simlog.truth[:, 1] + simlog.truth[:, 2]]
    x0, x1 = _range(xs)
    y0, y1 = _range(ys)
    # equal aspect: grow the narrower range to the panel's 4:3 shape
    span = max((x1 - x0) / (W - LEFT - RIGHT), (y1 - y0) / (H - TOP - BOTTOM))
    cx, cy = (x0 + x1) / 2, (y0 + y1) / 2
    hx, hy = span * (W - LEFT - RIGHT) / 2, span * (H - TOP - BOTTOM) / 2
    panel = Panel("agent paths around the target", "x", "y", (cx - hx, cx + hx), (cy - hy, cy + hy))
    records = len(simlog)
    picks = sorted({int(round(k)) for k in np.linspace(0, records - 1, snapshots)})
    for j, k in enumerate(picks):
        shade = f"#{int(200 - 150 * j / max(1, len(picks) - 1)):02x}0000"
        panel.circle(*simlog.truth[k], shade)
        panel.circle(*simlog.estimate[k], "#555555", dash="4 3")
    for i in range(simlog.n):
        color = COLORS[i % len(COLORS)]
        panel.line(simlog.px[:, i], simlog.py[:, i], color, f"agent {i + 1}", width=1.0)
        panel.dot(simlog.px[-1, i], simlog.py[-1, i], color)
    return panel.render()


def figure_set(simlog) -> dict[str, str]:
    """All panels of a run, keyed by file name."""
    t = simlog.t
    return {
        "target_x.svg": series_panel("target centre x", "x", t, [("true", simlog.truth[:, 0]),
                                                                ("estimate", simlog.estimate[:, 0])]),
        "target_y.svg": series_panel("target centre y", "y", t, [("true", simlog.truth[:, 1]),
                                                                ("estimate", simlog.estimate[:, 1])]),
        "target_r.svg": series_panel("target radius", "r", t, [("true", simlog.truth[:, 2]),
                                                              ("estimate", simlog.estimate[:, 2])]),
        "tracking_db1.svg": series_panel("boundary distance of agent 1", "D^b_1", t,
                                         [("D^b_1", simlog.db[:, 0])]),
        "tracking_beta1.svg": series_panel("angle to successor, agent 1", "beta_1 (rad)", t,
                                           [("beta_1", simlog.beta[:, 0]),
                                            ("2pi/n", np.full(len(t), 2 * math.pi / simlog.n))]),
        "control_u1.svg": series_panel("applied control of agent 1", "U_1", t,
                                       [("x", simlog.ux[:, 0]), ("y", simlog.uy[:, 0])]),
        "paths.svg": path_panel(simlog),
    }
