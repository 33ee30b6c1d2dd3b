"""Static SVG charts of supply-power-vs-rate sweep results.

The chart is written directly as a self-contained SVG text file: one
polyline per scheme, a legend, and dashed markers on the power axis at the
model's sleep and stand-by levels.  No plotting toolkit is involved, so the
output is byte-reproducible.
"""

from __future__ import annotations

import math

from .allocator import SchemeKind
from .power_model import UnknownPreset, preset

__all__ = ["EmptySelection", "emit_plot"]


class EmptySelection(Exception):
    """No records available for the requested power model."""


_PALETTE = {
    SchemeKind.PRAIS: "#1b9e77",
    SchemeKind.PC_ONLY: "#d95f02",
    SchemeKind.DTX_ONLY: "#7570b3",
    SchemeKind.BANDWIDTH_ADAPTATION: "#e7298a",
    SchemeKind.MAX_POWER_REFERENCE: "#66a61e",
}

_WIDTH, _HEIGHT = 760, 480
_ML, _MR, _MT, _MB = 70, 190, 46, 56  # margins: left, right, top, bottom
_PW = _WIDTH - _ML - _MR
_PH = _HEIGHT - _MT - _MB


def _nice_step(span: float, target: int = 6) -> float:
    raw = span / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if mult * mag >= raw:
            return mult * mag
    return 10.0 * mag


def emit_plot(records, power_model: str, path) -> None:
    """Write one supply-power-vs-rate chart for ``power_model`` to ``path``.

    One polyline per scheme present in ``records`` (points with undefined
    means are skipped), rates on the x axis in Mbit/s.
    """
    sel = [r for r in records if r.power_model == power_model]
    if not sel:
        raise EmptySelection(f"no records for power model {power_model!r}")
    schemes = [s for s in SchemeKind if any(r.scheme == s for r in sel)]
    curves = {}
    for scheme in schemes:
        pts = sorted(
            (r.rate_bps / 1e6, r.mean_watts)
            for r in sel
            if r.scheme == scheme and not math.isnan(r.mean_watts)
        )
        curves[scheme] = pts

    try:
        pm = preset(power_model)
    except UnknownPreset:
        pm = None

    xmax = max(r.rate_bps / 1e6 for r in sel)
    ys = [y for pts in curves.values() for _, y in pts]
    if pm is not None:
        ys.append(pm.p0_watts)
    ymax = 1.06 * max(ys) if ys else 1.0
    xmax = xmax if xmax > 0.0 else 1.0

    def px(x):
        return _ML + _PW * x / xmax

    def py(y):
        return _MT + _PH * (1.0 - y / ymax)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<text x="{_ML}" y="24" font-size="15">mean supply power vs per-user rate '
        f"({power_model})</text>",
    ]

    # axes with ticks
    out.append(
        f'<line x1="{_ML}" y1="{_MT}" x2="{_ML}" y2="{_MT + _PH}" stroke="black"/>'
    )
    out.append(
        f'<line x1="{_ML}" y1="{_MT + _PH}" x2="{_ML + _PW}" y2="{_MT + _PH}" '
        f'stroke="black"/>'
    )
    xstep = _nice_step(xmax)
    tick = 0.0
    while tick <= xmax * (1.0 + 1e-9):
        x = px(tick)
        out.append(
            f'<line x1="{x:.2f}" y1="{_MT + _PH}" x2="{x:.2f}" y2="{_MT + _PH + 5}" '
            f'stroke="black"/>'
        )
        out.append(
            f'<text x="{x:.2f}" y="{_MT + _PH + 20}" text-anchor="middle">'
            f"{tick:.4g}</text>"
        )
        tick += xstep
    ystep = _nice_step(ymax)
    tick = 0.0
    while tick <= ymax * (1.0 + 1e-9):
        y = py(tick)
        out.append(
            f'<line x1="{_ML - 5}" y1="{y:.2f}" x2="{_ML}" y2="{y:.2f}" stroke="black"/>'
        )
        out.append(
            f'<text x="{_ML - 9}" y="{y + 4:.2f}" text-anchor="end">{tick:.4g}</text>'
        )
        tick += ystep
    out.append(
        f'<text x="{_ML + _PW / 2:.2f}" y="{_HEIGHT - 14}" text-anchor="middle">'
        f"per-user rate (Mbit/s)</text>"
    )
    out.append(
        f'<text x="20" y="{_MT + _PH / 2:.2f}" text-anchor="middle" '
        f'transform="rotate(-90 20 {_MT + _PH / 2:.2f})">mean supply power (W)</text>'
    )

    # power-axis markers at the sleep and stand-by consumption levels
    if pm is not None:
        for level, label in ((pm.ps_watts, "sleep"), (pm.p0_watts, "stand-by")):
            y = py(level)
            out.append(
                f'<line x1="{_ML}" y1="{y:.2f}" x2="{_ML + _PW}" y2="{y:.2f}" '
                f'stroke="#999999" stroke-dasharray="5 4"/>'
            )
            out.append(
                f'<text x="{_ML + _PW + 6}" y="{y + 4:.2f}" fill="#555555">'
                f"{label} {level:.4g} W</text>"
            )

    for scheme in schemes:
        pts = curves[scheme]
        color = _PALETTE[scheme]
        if pts:
            coords = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in pts)
            out.append(
                f'<polyline fill="none" stroke="{color}" stroke-width="1.8" '
                f'points="{coords}"/>'
            )
        else:
            # keep one polyline per scheme even when every point is undefined
            out.append(f'<polyline fill="none" stroke="{color}" points=""/>')

    # legend
    ly = _MT + 8
    for scheme in schemes:
        color = _PALETTE[scheme]
        x0 = _ML + _PW + 6
        out.append(
            f'<line x1="{x0}" y1="{ly - 4}" x2="{x0 + 22}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="3"/>'
        )
        out.append(f'<text x="{x0 + 28}" y="{ly}">{scheme.value}</text>')
        ly += 18

    out.append("</svg>")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(out) + "\n")
