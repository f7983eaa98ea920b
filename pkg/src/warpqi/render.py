"""SVG rendering of a per-triangle quality map over the scatterplot."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptyTriangulation, SizeMismatch
from .geometry import as_points2


def _hex_to_rgb(color):
    color = color.lstrip("#")
    return tuple(int(color[i : i + 2], 16) for i in (0, 2, 4))


@dataclass(frozen=True)
class DivergingColormap:
    """Piecewise-linear RGB map over [-1, 1]: ``low`` at -1, ``mid`` at 0, ``high`` at +1."""

    low: str = "#2166ac"
    mid: str = "#ffffff"
    high: str = "#b2182b"

    def rgb(self, q):
        q = min(max(float(q), -1.0), 1.0)
        a, b = (self.mid, self.high) if q >= 0 else (self.mid, self.low)
        t = abs(q)
        ca, cb = _hex_to_rgb(a), _hex_to_rgb(b)
        return tuple(int(round(x + (y - x) * t)) for x, y in zip(ca, cb))

    def __call__(self, q) -> str:
        return "#%02x%02x%02x" % self.rgb(q)


@dataclass(frozen=True)
class RenderSpec:
    width: int = 800
    height: int = 800
    margin: int = 40
    colormap: DivergingColormap = field(default_factory=DivergingColormap)
    point_radius: float = 1.2
    draw_edges: bool = True
    draw_points: bool = True
    colorbar: bool = True
    edge_color: str = "#4d4d4d"
    edge_width: float = 0.25
    point_color: str = "#1a1a1a"

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("width and height must be positive")
        if 2 * self.margin >= min(self.width, self.height):
            raise ValueError("margin leaves no room to draw")
        if self.colorbar and self.width - 2 * self.margin - _colorbar_space(self) <= 0:
            raise ValueError("too narrow for the colour bar; widen the canvas or pass colorbar=False")


def _fmt(v):
    s = "%.3f" % v
    return "0.000" if s == "-0.000" else s


def viewport_transform(coords, spec: RenderSpec):
    """Map layout coordinates into the drawing box, keeping the aspect ratio.

    The drawing box is the canvas minus the margin, and minus a strip on the
    right when a colour bar is drawn. y is flipped so that up stays up.
    """
    coords = np.asarray(coords, dtype=float)
    right = spec.width - spec.margin - (_colorbar_space(spec) if spec.colorbar else 0)
    box_w = right - spec.margin
    box_h = spec.height - 2 * spec.margin
    lo, hi = coords.min(axis=0), coords.max(axis=0)
    extent = np.maximum(hi - lo, np.finfo(float).tiny)
    scale = min(box_w / extent[0], box_h / extent[1])
    off_x = spec.margin + (box_w - scale * extent[0]) / 2
    off_y = spec.margin + (box_h - scale * extent[1]) / 2
    x = off_x + (coords[:, 0] - lo[0]) * scale
    y = off_y + (hi[1] - coords[:, 1]) * scale
    return np.column_stack([x, y])


def _colorbar_space(spec):
    return max(60, spec.width // 10)


def _colorbar(spec: RenderSpec):
    space = _colorbar_space(spec)
    bar_w = max(12, space // 4)
    x = spec.width - spec.margin - space + (space - bar_w) // 2 - 8
    top = spec.margin
    bottom = spec.height - spec.margin
    cmap = spec.colormap
    out = [
        '<g id="colorbar" font-family="sans-serif" font-size="12" fill="#000000">',
        f'<rect x="{x}" y="{top}" width="{bar_w}" height="{bottom - top}" fill="url(#quality-gradient)" stroke="#000000" stroke-width="0.5"/>',
    ]
    for q in (1.0, 0.0, -1.0):
        y = top + (1.0 - q) / 2.0 * (bottom - top)
        label = {1.0: "+1", 0.0: "0", -1.0: "-1"}[q]
        out.append(
            f'<line x1="{x + bar_w}" y1="{_fmt(y)}" x2="{x + bar_w + 5}" y2="{_fmt(y)}" stroke="#000000" stroke-width="1"/>'
        )
        out.append(f'<text x="{x + bar_w + 8}" y="{_fmt(y + 4)}">{label}</text>')
    out.append("</g>")
    defs = [
        "<defs>",
        '<linearGradient id="quality-gradient" x1="0" y1="1" x2="0" y2="0">',
        f'<stop offset="0" stop-color="{cmap(-1.0)}"/>',
        f'<stop offset="0.5" stop-color="{cmap(0.0)}"/>',
        f'<stop offset="1" stop-color="{cmap(1.0)}"/>',
        "</linearGradient>",
        "</defs>",
    ]
    return defs, out


def render_quality_svg(layout, triangulation, quality, spec: RenderSpec | None = None) -> str:
    """SVG 1.1 document with one filled polygon per triangle.

    Parameters
    ----------
    layout : (n, 2) array_like or Layout
    triangulation : Triangulation or (m, 3) int array
    quality : QualityMap or sequence of m values in [-1, 1]
    spec : RenderSpec, optional

    Polygons appear in triangulation order, points in index order; the
    output is byte-identical for identical input.
    """
    spec = spec or RenderSpec()
    coords = as_points2(layout)
    tris = np.asarray(getattr(triangulation, "triangles", triangulation), dtype=np.intp).reshape(-1, 3)
    q = np.asarray(getattr(quality, "q_values", quality), dtype=float)
    if len(tris) == 0:
        raise EmptyTriangulation("nothing to draw: the triangulation is empty")
    if len(q) != len(tris):
        raise SizeMismatch(f"{len(q)} quality values for {len(tris)} triangles")

    xy = viewport_transform(coords, spec)
    w, h = spec.width, spec.height
    lines = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
    ]
    if spec.colorbar:
        defs, bar = _colorbar(spec)
        lines.extend(defs)
    lines.append(f'<rect x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/>')
    if spec.draw_edges:
        stroke = f'stroke="{spec.edge_color}" stroke-width="{spec.edge_width}" stroke-linejoin="round"'
    else:
        stroke = 'stroke="none"'
    lines.append(f'<g id="triangles" {stroke}>')
    for tri, value in zip(tris, q):
        pts = " ".join(f"{_fmt(xy[i, 0])},{_fmt(xy[i, 1])}" for i in tri)
        lines.append(f'<polygon points="{pts}" fill="{spec.colormap(value)}"/>')
    lines.append("</g>")
    if spec.draw_points:
        lines.append(f'<g id="points" fill="{spec.point_color}">')
        r = _fmt(spec.point_radius)
        for x, y in xy:
            lines.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{r}"/>')
        lines.append("</g>")
    if spec.colorbar:
        lines.extend(bar)
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def save_svg(doc: str, path):
    Path(path).write_text(doc, encoding="utf-8")
