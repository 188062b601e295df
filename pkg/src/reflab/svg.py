"""Barycentric SVG pictures of normalized roots and the isotropic conic (rank 3)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence
from xml.sax.saxutils import escape

from .core import RootSlice, bform
from .errors import RankUnsupported
from .projective import normalized_coords
from .scalars import Mode
from .subgroups import fiber

# layout: all constants live here so output is bit-stable
CANVAS_W, CANVAS_H = 1000, 900
MARGIN = 80
VERTICES = (
    (MARGIN, CANVAS_H - MARGIN),  # alpha_1, bottom left
    (CANVAS_W - MARGIN, CANVAS_H - MARGIN),  # alpha_2, bottom right
    (CANVAS_W / 2, CANVAS_H - MARGIN - (CANVAS_W - 2 * MARGIN) * math.sqrt(3) / 2),  # alpha_3, top
)
CONIC_SAMPLES = 720
HIGHLIGHT_COLORS = ("blue", "green", "purple", "orange", "red")
DOT_COLOR = "#333333"


def dot_radius(depth: int) -> float:
    return max(0.8, 4.0 - 0.35 * depth)


@dataclass
class SvgOptions:
    fibers: list = field(default_factory=list)  # (axis, c) pairs
    segments: list = field(default_factory=list)  # (id_a, id_b, label_a, label_b)
    title: Optional[str] = None


def _xy(bary: Sequence[float]) -> tuple:
    x = sum(w * v[0] for w, v in zip(bary, VERTICES))
    y = sum(w * v[1] for w, v in zip(bary, VERTICES))
    return x, y


def _f(x: float) -> str:
    s = f"{x:.2f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _bary(slice_: RootSlice, rid: int) -> tuple:
    return tuple(float(x) for x in normalized_coords(slice_.coeffs(rid), slice_.mode))


def conic_points(slice_: RootSlice) -> list:
    """Sample {B(x, x) = 0} inside the triangle along rays from the barycentre.

    Empty when the barycentre is not strictly inside the cone (e.g. for a
    positive definite form).
    """
    g = [[float(x) for x in row] for row in slice_.gram.entries]

    def q(u, v):
        return sum(u[i] * g[i][j] * v[j] for i in range(3) for j in range(3))

    p0 = (1 / 3, 1 / 3, 1 / 3)
    if q(p0, p0) >= 0:
        return []
    e1 = (1 / math.sqrt(2), -1 / math.sqrt(2), 0.0)
    e2 = (1 / math.sqrt(6), 1 / math.sqrt(6), -2 / math.sqrt(6))
    pts = []
    for k in range(CONIC_SAMPLES):
        th = 2 * math.pi * k / CONIC_SAMPLES
        d = tuple(math.cos(th) * a + math.sin(th) * b for a, b in zip(e1, e2))
        a, b, c = q(d, d), 2 * q(p0, d), q(p0, p0)
        if abs(a) < 1e-15:
            continue
        disc = b * b - 4 * a * c
        if disc < 0:
            continue
        ts = [t for t in ((-b - math.sqrt(disc)) / (2 * a), (-b + math.sqrt(disc)) / (2 * a)) if t > 0]
        if not ts:
            continue
        p = tuple(x + min(ts) * y for x, y in zip(p0, d))
        if min(p) < -1e-12:
            continue  # the cone leaves the triangle along this ray
        pts.append(_xy(p))
    return pts


def render_svg(slice_: RootSlice, options: Optional[SvgOptions] = None) -> str:
    if slice_.rank != 3:
        raise RankUnsupported("SVG rendering needs rank 3")
    opts = options or SvgOptions()
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS_W}" height="{CANVAS_H}" '
        f'viewBox="0 0 {CANVAS_W} {CANVAS_H}">',
        f'<rect width="{CANVAS_W}" height="{CANVAS_H}" fill="white"/>',
    ]
    if opts.title:
        out.append(f'<title>{escape(opts.title)}</title>')
    tri = " ".join(f"{_f(x)},{_f(y)}" for x, y in VERTICES)
    out.append(f'<polygon class="triangle" points="{tri}" fill="none" stroke="black" stroke-width="1.5"/>')
    offsets = ((-30, 30), (30, 30), (0, -20))
    for i, ((x, y), (dx, dy)) in enumerate(zip(VERTICES, offsets)):
        out.append(f'<circle class="vertex" cx="{_f(x)}" cy="{_f(y)}" r="5" fill="black"/>')
        out.append(f'<text x="{_f(x + dx)}" y="{_f(y + dy)}" font-size="22" text-anchor="middle">'
                   f'&#945;{i + 1}</text>')
    pts = conic_points(slice_)
    if pts:
        d = "M " + " L ".join(f"{_f(x)},{_f(y)}" for x, y in pts) + " Z"
        out.append(f'<path class="conic" d="{d}" fill="none" stroke="red" stroke-width="1.2"/>')
    out.append('<g class="roots">')
    for r in slice_:
        x, y = _xy(_bary(slice_, r.id))
        out.append(f'<circle class="root" data-id="{r.id}" cx="{_f(x)}" cy="{_f(y)}" '
                   f'r="{_f(dot_radius(r.depth))}" fill="{DOT_COLOR}"/>')
    out.append("</g>")
    color = iter(HIGHLIGHT_COLORS * 4)
    for axis, c in opts.fibers:
        ids = fiber(slice_, axis, c)
        col = next(color)
        if not ids:
            continue
        xy = sorted(_xy(_bary(slice_, i)) for i in ids)
        out.append(f'<g class="fiber" data-axis="{axis + 1}" data-c="{escape(str(c))}">')
        if len(xy) > 1:
            (x1, y1), (x2, y2) = xy[0], xy[-1]
            out.append(f'<line x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}" '
                       f'stroke="{col}" stroke-width="2"/>')
        for x, y in xy:
            out.append(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="3.5" fill="{col}"/>')
        out.append("</g>")
    for seg in opts.segments:
        a, b = seg[0], seg[1]
        labels = tuple(seg[2:4]) if len(seg) >= 4 else ("", "")
        col = next(color)
        (x1, y1), (x2, y2) = _xy(_bary(slice_, a)), _xy(_bary(slice_, b))
        out.append(f'<g class="segment" data-ids="{a},{b}">')
        out.append(f'<line x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}" '
                   f'stroke="{col}" stroke-width="2"/>')
        for (x, y), lab in zip(((x1, y1), (x2, y2)), labels):
            out.append(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="4" fill="{col}"/>')
            if lab:
                out.append(f'<text x="{_f(x + 8)}" y="{_f(y - 8)}" font-size="18">{escape(lab)}</text>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def normroots_rows(slice_: RootSlice) -> list:
    """Rows for normroots.csv: id, x1..xn, sign of B(x, x)."""
    from .projective import qform
    from .scalars import fmt, sign

    rows = []
    for r in slice_:
        p = normalized_coords(r.coeffs, slice_.mode)
        rows.append([r.id, *[fmt(x) for x in p], sign(qform(p, slice_.gram), slice_.mode)])
    return rows
