"""Deterministic SVG rendering of 2-D measures, partitions and paths.

Fixed viewbox from the measure bounding box plus a 10% margin; measures as
translucent fills, partition boundaries stroked, through-infinity runs dashed
with an infinity glyph.  Output bytes depend only on the inputs.
"""

import numpy as np

from . import _geometry as geom
from .errors import DimensionError

PALETTE = ("#1b6ca8", "#c0392b", "#1e8449", "#8e44ad", "#b7950b", "#17a2b8")
CANVAS = 640.0


def _fmt(x):
    return f"{x:.6f}"


class _Canvas:
    def __init__(self, measures, pad_frac=0.10):
        los = np.min([m.bounding_box()[0] for m in measures], axis=0)
        his = np.max([m.bounding_box()[1] for m in measures], axis=0)
        pad = np.maximum(his - los, 1e-9) * pad_frac
        self.lo = los - pad
        self.hi = his + pad
        span = float(np.max(self.hi - self.lo))
        self.scale = CANVAS / span
        self.width = (self.hi[0] - self.lo[0]) * self.scale
        self.height = (self.hi[1] - self.lo[1]) * self.scale
        self.parts = []

    def pt(self, x, y):
        px = (min(max(x, self.lo[0]), self.hi[0]) - self.lo[0]) * self.scale
        py = (self.hi[1] - min(max(y, self.lo[1]), self.hi[1])) * self.scale
        return px, py

    def rect(self, lo, hi, fill, opacity=0.35):
        x0, y1 = self.pt(lo[0], lo[1])
        x1, y0 = self.pt(hi[0], hi[1])
        self.parts.append(
            f'<rect x="{_fmt(x1 if x1 < x0 else x0)}" y="{_fmt(y0)}" '
            f'width="{_fmt(abs(x1 - x0))}" height="{_fmt(abs(y1 - y0))}" '
            f'fill="{fill}" fill-opacity="{opacity}" stroke="none"/>'
        )

    def line(self, a, b, dashed=False, colour="#222222", width=2.0):
        x0, y0 = self.pt(*a)
        x1, y1 = self.pt(*b)
        dash = ' stroke-dasharray="8 5"' if dashed else ""
        self.parts.append(
            f'<line x1="{_fmt(x0)}" y1="{_fmt(y0)}" x2="{_fmt(x1)}" '
            f'y2="{_fmt(y1)}" stroke="{colour}" stroke-width="{width}"{dash}/>'
        )

    def polygon(self, pts, colour="#222222", width=1.5):
        if len(pts) < 2:
            return
        coords = " ".join(
            f"{_fmt(px)},{_fmt(py)}" for px, py in (self.pt(*p) for p in pts)
        )
        self.parts.append(
            f'<polygon points="{coords}" fill="none" stroke="{colour}" '
            f'stroke-width="{width}"/>'
        )

    def text(self, pos, label, colour="#333333"):
        px, py = self.pt(*pos)
        self.parts.append(
            f'<text x="{_fmt(px)}" y="{_fmt(py)}" font-size="16" '
            f'font-family="monospace" fill="{colour}">{label}</text>'
        )

    def document(self):
        body = "\n".join(self.parts)
        return (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" '
            f'width="{_fmt(self.width)}" height="{_fmt(self.height)}" '
            f'viewBox="0 0 {_fmt(self.width)} {_fmt(self.height)}">\n'
            f'<rect width="100%" height="100%" fill="#ffffff"/>\n'
            f"{body}\n</svg>\n"
        )


def _draw_measures(canvas, measures):
    for i, m in enumerate(measures):
        colour = PALETTE[i % len(PALETTE)]
        for lo, hi, _ in m.atoms:
            canvas.rect(lo, hi, colour)


def _clip_to_canvas(canvas, region):
    poly = geom.box_polytope(tuple(canvas.lo), tuple(canvas.hi))
    pairs = region.pairs()
    if pairs is None:
        return poly[:0]
    for n, b in pairs:
        poly = geom.clip_polygon(poly, n, b)
    return poly


def render_svg(obj, measures) -> str:
    """Render a partition-like object over its measures (d = 2 only)."""
    if measures and measures[0].dim != 2:
        raise DimensionError("SVG rendering requires 2-D measures")
    canvas = _Canvas(measures)
    _draw_measures(canvas, measures)
    if obj is None:
        return canvas.document()

    kind = type(obj).__name__
    if kind == "StairPath":
        _draw_stairpath(canvas, obj)
    elif kind == "StairPartition":
        from .stairpath import to_path

        _draw_stairpath(canvas, to_path(obj))
    elif kind == "ChessboardColouring":
        _draw_chessboard(canvas, obj)
    elif kind in ("NestedPartition", "FairSplit", "CompositeSplit"):
        _draw_regions(canvas, obj)
    else:
        raise TypeError(f"cannot render {kind}")
    return canvas.document()


def _draw_stairpath(canvas, path):
    for seg in path.segments:
        if seg.kind == "V":
            lo = max(seg.lo, canvas.lo[1])
            hi = min(seg.hi, canvas.hi[1])
            if hi > lo and np.isfinite(seg.fixed):
                canvas.line((seg.fixed, lo), (seg.fixed, hi))
        else:
            if seg.through_infinity:
                canvas.line((seg.lo, seg.fixed), (canvas.hi[0], seg.fixed),
                            dashed=True)
                canvas.line((canvas.lo[0], seg.fixed), (seg.hi, seg.fixed),
                            dashed=True)
                canvas.text((canvas.hi[0], seg.fixed), "&#8734;")
            else:
                a, b = sorted((seg.lo, seg.hi))
                canvas.line((max(a, canvas.lo[0] - 1e9), seg.fixed),
                            (min(b, canvas.hi[0] + 1e9), seg.fixed))


def _draw_chessboard(canvas, colouring):
    for v, offs in zip(colouring.directions, colouring.offsets):
        v = np.asarray(v, dtype=float)
        perp = np.array([-v[1], v[0]])
        centre = 0.5 * (canvas.lo + canvas.hi)
        span = float(np.max(canvas.hi - canvas.lo)) * 2.0
        for o in offs:
            base = centre + (o - float(v @ centre)) * v / float(v @ v)
            a = base - span * perp
            b = base + span * perp
            canvas.line(tuple(a), tuple(b))


def _draw_regions(canvas, obj):
    if type(obj).__name__ == "NestedPartition":
        from .nested import parts as nested_parts

        regions = nested_parts(obj)
        labels = obj.labels
    else:
        regions = obj.regions
        labels = obj.labels
    for region, label in zip(regions, labels):
        poly = _clip_to_canvas(canvas, region)
        if len(poly) < 3:
            continue
        canvas.polygon([tuple(p) for p in poly])
        centroid = poly.mean(axis=0)
        canvas.text(tuple(centroid), str(label))
