"""Deterministic SVG rendering of sampled curves with singular-point markers.

The y axis is flipped so the picture matches mathematical orientation, the
viewBox is the joint bounding box plus a 5% margin, and identical input
produces byte-identical output.
"""

from __future__ import annotations

import numpy as np

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _fmt(v: float) -> str:
    return repr(float(v))


def render_svg(curves, markers=None) -> str:
    """SVG document for labeled polylines.

    curves: sequence of (label, (n, 2) array) pairs; markers: optional
    (m, 2) array of points drawn as circles (cusp locations).  A zero-extent
    bounding box (a curve collapsed to a point) falls back to a unit viewBox.
    """
    if not curves:
        raise ValueError("no curves to render")
    pts_all = [np.asarray(p, dtype=float) for _, p in curves]
    if any(p.size == 0 for p in pts_all):
        raise ValueError("empty polyline")
    stacked = np.vstack(pts_all + ([np.asarray(markers, dtype=float)] if markers is not None and len(markers) else []))
    # Flip y so the plot matches mathematical orientation.
    xs, ys = stacked[:, 0], -stacked[:, 1]
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    w, h = x1 - x0, y1 - y0
    if w == 0.0 and h == 0.0:
        x0, y0, w, h = x0 - 0.5, y0 - 0.5, 1.0, 1.0
    margin = 0.05 * max(w, h, 1e-30)
    vb = (x0 - margin, y0 - margin, w + 2 * margin, h + 2 * margin)
    stroke = max(vb[2], vb[3]) / 400.0
    marker_r = 3.0 * stroke

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="640" height="640" '
        f'viewBox="{_fmt(vb[0])} {_fmt(vb[1])} {_fmt(vb[2])} {_fmt(vb[3])}">',
    ]
    for i, (label, pts) in enumerate(curves):
        pts = np.asarray(pts, dtype=float)
        color = _PALETTE[i % len(_PALETTE)]
        if len(pts) == 1 or np.ptp(pts, axis=0).max() == 0.0:
            # Degenerate curve: render its single location as a marker.
            lines.append(
                f'<circle cx="{_fmt(pts[0, 0])}" cy="{_fmt(-pts[0, 1])}" '
                f'r="{_fmt(marker_r)}" fill="{color}"><title>{label}</title></circle>'
            )
            continue
        d = "M " + " L ".join(f"{_fmt(p[0])},{_fmt(-p[1])}" for p in pts)
        lines.append(
            f'<path d="{d}" fill="none" stroke="{color}" '
            f'stroke-width="{_fmt(stroke)}"><title>{label}</title></path>'
        )
    if markers is not None:
        for m in np.asarray(markers, dtype=float):
            lines.append(
                f'<circle cx="{_fmt(m[0])}" cy="{_fmt(-m[1])}" r="{_fmt(marker_r)}" '
                'fill="none" stroke="#000000" '
                f'stroke-width="{_fmt(stroke)}"/>'
            )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
