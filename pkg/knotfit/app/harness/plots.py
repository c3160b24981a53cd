"""
SVG overlays of original points and fitted curves.

2-D data gets one panel; 3-D data is projected onto the xy, xz and yz planes
in three side-by-side panels. Each panel is a nested <svg> whose viewBox is
fitted to the data it shows.
"""

from typing import Dict, List, Tuple
from xml.sax.saxutils import escape

import numpy as np

from app.core.config import settings
from app.geometry.bspline import BSplineCurve

PALETTE = ("#d62728", "#1f77b4", "#2ca02c", "#9467bd")
POINT_COLOUR = "#444444"
LEGEND_HEIGHT = 28
MIN_POLYLINE_SAMPLES = 500
PLANES_3D: Tuple[Tuple[int, int], ...] = ((0, 1), (0, 2), (1, 2))
AXES = "xyz"


def _fmt(value: float) -> str:
    return f"{value:.6g}"


def _bounds(arrays: List[np.ndarray]) -> Tuple[float, float, float, float]:
    stacked = np.vstack(arrays)
    lo, hi = stacked.min(axis=0), stacked.max(axis=0)
    span = max(float(np.max(hi - lo)), 1e-12)
    pad = 0.05 * span
    width = max(float(hi[0] - lo[0]), 1e-12) + 2 * pad
    height = max(float(hi[1] - lo[1]), 1e-12) + 2 * pad
    # y is drawn flipped, so the box starts at -max_y
    return float(lo[0]) - pad, -float(hi[1]) - pad, width, height


def _panel(
    points: np.ndarray,
    polylines: Dict[str, np.ndarray],
    plane: Tuple[int, int],
    x: int,
    size: int,
) -> List[str]:
    projected = points[:, plane]
    curves = {label: samples[:, plane] for label, samples in polylines.items()}
    min_x, min_y, width, height = _bounds([projected, *curves.values()])
    radius = 0.006 * max(width, height)

    lines = [
        f'<rect x="{x}" y="{LEGEND_HEIGHT}" width="{size}" height="{size}" fill="white" stroke="#cccccc"/>',
        f'<text x="{x + 6}" y="{LEGEND_HEIGHT + 16}" font-size="12" fill="#666666">'
        f"{AXES[plane[0]]}{AXES[plane[1]]}</text>",
        f'<svg x="{x}" y="{LEGEND_HEIGHT}" width="{size}" height="{size}" '
        f'viewBox="{_fmt(min_x)} {_fmt(min_y)} {_fmt(width)} {_fmt(height)}" '
        f'preserveAspectRatio="xMidYMid meet">',
    ]
    for px, py in projected:
        lines.append(
            f'<circle cx="{_fmt(px)}" cy="{_fmt(-py)}" r="{_fmt(radius)}" fill="{POINT_COLOUR}" fill-opacity="0.6"/>'
        )
    for colour, (label, samples) in zip(PALETTE, curves.items()):
        coords = " ".join(f"{_fmt(cx)},{_fmt(-cy)}" for cx, cy in samples)
        lines.append(
            f'<polyline points="{coords}" fill="none" stroke="{colour}" stroke-width="1.5" '
            f'vector-effect="non-scaling-stroke"><title>{escape(label)}</title></polyline>'
        )
    lines.append("</svg>")
    return lines


def _legend(labels: List[str]) -> List[str]:
    lines = [
        f'<rect x="8" y="8" width="10" height="10" fill="{POINT_COLOUR}"/>',
        '<text x="22" y="17" font-size="12">original points</text>',
    ]
    x = 130
    for colour, label in zip(PALETTE, labels):
        lines.append(f'<line x1="{x}" y1="13" x2="{x + 18}" y2="13" stroke="{colour}" stroke-width="2"/>')
        lines.append(f'<text x="{x + 24}" y="17" font-size="12">{escape(label)}</text>')
        x += 34 + 7 * len(label)
    return lines


def render_svg(
    original: np.ndarray,
    fits: Dict[str, BSplineCurve],
    samples: int = settings.SVG_SAMPLES,
    panel_size: int = settings.SVG_PANEL_SIZE,
) -> str:
    """SVG document overlaying `original` markers and one polyline per fitted curve."""
    original = np.asarray(original, dtype=float)
    params = np.linspace(0.0, 1.0, max(samples, MIN_POLYLINE_SAMPLES))
    polylines = {label: curve.evaluate(params) for label, curve in fits.items()}
    planes = PLANES_3D if original.shape[1] == 3 else ((0, 1),)

    width = panel_size * len(planes)
    height = panel_size + LEGEND_HEIGHT
    body = _legend(list(polylines))
    for index, plane in enumerate(planes):
        body.extend(_panel(original, polylines, plane, index * panel_size, panel_size))

    return "\n".join(
        [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">',
            *body,
            "</svg>",
            "",
        ]
    )
