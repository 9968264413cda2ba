"""Dual-axis line chart in the style of the paper's Figure 2, written as plain SVG.

Cost trajectory on the left axis, order quantity on the right axis, both against
delta; the Scarf limits are dashed horizontal reference lines.  The output has
exactly two ``<polyline>`` elements and two dashed ``<line>`` elements.
"""
from __future__ import annotations

import math
from typing import Sequence
from xml.sax.saxutils import escape

W, H = 640, 400
LEFT, RIGHT, TOP, BOTTOM = 70, 70, 40, 50
COST_COLOR = "#1f77b4"
Q_COLOR = "#d62728"


def _nice_range(values: Sequence[float]) -> tuple[float, float]:
    vals = [v for v in values if math.isfinite(v)]
    if not vals:
        return 0.0, 1.0
    lo, hi = min(vals), max(vals)
    if hi - lo < 1e-12:
        pad = max(abs(hi) * 0.05, 1.0)
    else:
        pad = 0.08 * (hi - lo)
    return lo - pad, hi + pad


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw)) if raw > 0 else 1.0
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=mag * 10)
    start = math.ceil(lo / step) * step
    out, v = [], start
    while v <= hi + 1e-12 * abs(hi) and len(out) < 20:
        out.append(round(v, 10))
        v += step
    return out


def render_figure2(
    deltas: Sequence[float],
    costs: Sequence[float],
    qs: Sequence[float],
    scarf_cost: float,
    scarf_q: float,
    title: str = "Worst-case cost and order quantity vs. ambiguity radius",
) -> str:
    pw, ph = W - LEFT - RIGHT, H - TOP - BOTTOM
    d_lo, d_hi = (min(deltas), max(deltas)) if deltas else (0.0, 1.0)
    if d_hi - d_lo < 1e-12:
        d_lo, d_hi = d_lo - 0.5, d_hi + 0.5
    c_lo, c_hi = _nice_range(list(costs) + [scarf_cost])
    q_lo, q_hi = _nice_range(list(qs) + [scarf_q])

    def sx(d):
        return LEFT + (d - d_lo) / (d_hi - d_lo) * pw

    def sy(v, lo, hi):
        return TOP + (1.0 - (v - lo) / (hi - lo)) * ph

    def pts(ys, lo, hi):
        return " ".join(
            f"{sx(d):.2f},{sy(v, lo, hi):.2f}" for d, v in zip(deltas, ys) if math.isfinite(v)
        )

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" '
        'font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
        f'<text x="{W / 2:.1f}" y="20" text-anchor="middle" font-size="13">{escape(title)}</text>',
        f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>',
    ]
    for t in _ticks(d_lo, d_hi):
        parts.append(f'<text x="{sx(t):.2f}" y="{TOP + ph + 16}" text-anchor="middle">{t:g}</text>')
    for t in _ticks(c_lo, c_hi):
        parts.append(f'<text x="{LEFT - 6}" y="{sy(t, c_lo, c_hi) + 4:.2f}" text-anchor="end" fill="{COST_COLOR}">{t:g}</text>')
    for t in _ticks(q_lo, q_hi):
        parts.append(f'<text x="{LEFT + pw + 6}" y="{sy(t, q_lo, q_hi) + 4:.2f}" text-anchor="start" fill="{Q_COLOR}">{t:g}</text>')
    parts += [
        f'<text x="{LEFT + pw / 2:.1f}" y="{H - 12}" text-anchor="middle">delta (Wasserstein radius)</text>',
        f'<text x="16" y="{TOP + ph / 2:.1f}" text-anchor="middle" fill="{COST_COLOR}" '
        f'transform="rotate(-90 16 {TOP + ph / 2:.1f})">worst-case cost (millions)</text>',
        f'<text x="{W - 16}" y="{TOP + ph / 2:.1f}" text-anchor="middle" fill="{Q_COLOR}" '
        f'transform="rotate(90 {W - 16} {TOP + ph / 2:.1f})">order quantity Q* (thousands)</text>',
        f'<line x1="{LEFT}" y1="{sy(scarf_cost, c_lo, c_hi):.2f}" x2="{LEFT + pw}" y2="{sy(scarf_cost, c_lo, c_hi):.2f}" '
        f'stroke="{COST_COLOR}" stroke-dasharray="6,4"/>',
        f'<line x1="{LEFT}" y1="{sy(scarf_q, q_lo, q_hi):.2f}" x2="{LEFT + pw}" y2="{sy(scarf_q, q_lo, q_hi):.2f}" '
        f'stroke="{Q_COLOR}" stroke-dasharray="6,4"/>',
        f'<polyline points="{pts(costs, c_lo, c_hi)}" fill="none" stroke="{COST_COLOR}" stroke-width="2"/>',
        f'<polyline points="{pts(qs, q_lo, q_hi)}" fill="none" stroke="{Q_COLOR}" stroke-width="2"/>',
        f'<text x="{LEFT + 8}" y="{TOP + 14}" fill="{COST_COLOR}">cost (Scarf limit {scarf_cost:.4g}, dashed)</text>',
        f'<text x="{LEFT + 8}" y="{TOP + 28}" fill="{Q_COLOR}">Q* (Scarf limit {scarf_q:.4g}, dashed)</text>',
        "</svg>",
    ]
    return "\n".join(parts) + "\n"
