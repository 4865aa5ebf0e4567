"""SVG pictures of the level curves through singular points or a probe point."""
from __future__ import annotations

import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidInput
from .foliation import levels_through_point
from .mapping import GDSMapping, Point2, as_point

WIDTH_PX = 800.0
MARGIN = 0.08
COLORS = ("#c0392b", "#2471a3", "#229954", "#b7950b", "#7d3c98", "#ca6f1e", "#17a589")


@dataclass(frozen=True)
class Viewport:
    """World rectangle mapped onto an image ``width x height`` pixels, y pointing down."""

    xmin: float
    ymin: float
    xmax: float
    ymax: float
    width: float = WIDTH_PX

    @property
    def scale(self) -> float:
        return self.width / (self.xmax - self.xmin)

    @property
    def height(self) -> float:
        return (self.ymax - self.ymin) * self.scale

    def to_image(self, x) -> tuple[float, float]:
        return ((x[0] - self.xmin) * self.scale, (self.ymax - x[1]) * self.scale)


def _level_extent(a1, a2, c1, c2, level):
    if a1 > 0 and a2 > 0 and level >= 0:
        rx, ry = math.sqrt(level / a1), math.sqrt(level / a2)
        return [(c1 - rx, c2 - ry), (c1 + rx, c2 + ry)]
    return []


def fit_viewport(m: GDSMapping, points: Sequence[Point2]) -> Viewport:
    """Smallest padded rectangle holding the centers, the points and every bounded level curve."""
    pts = [tuple(p) for p in m.P] + [tuple(p) for p in points]
    for q in points:
        for lv in levels_through_point(m, q):
            (a1, a2), (c1, c2) = m.A[lv.index], m.P[lv.index]
            pts.extend(_level_extent(a1, a2, c1, c2, lv.level))
    arr = np.array(pts)
    lo, hi = arr.min(axis=0), arr.max(axis=0)
    side = max(float(np.max(hi - lo)), 1e-6)
    pad = MARGIN * side
    lo, hi = lo - pad, hi + pad
    # keep a minimum extent in each direction so degenerate layouts still render
    for k in range(2):
        if hi[k] - lo[k] < 0.25 * side:
            mid = (hi[k] + lo[k]) / 2
            lo[k], hi[k] = mid - 0.125 * side, mid + 0.125 * side
    return Viewport(float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1]))


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def _branch_paths(vp: Viewport, a1, a2, c1, c2, level, samples: int = 400) -> str:
    """Path data for ``a1 (x - c1)^2 + a2 (y - c2)^2 = level`` when it is not an ellipse."""
    xs = np.linspace(vp.xmin, vp.xmax, samples)
    parts = []
    for sign in (1.0, -1.0):
        rad = (level - a1 * (xs - c1) ** 2) / a2
        ok = rad >= 0
        ys = c2 + sign * np.sqrt(np.where(ok, rad, 0.0))
        run = []
        for x, y, good in zip(xs, ys, ok):
            if good:
                run.append(vp.to_image((x, y)))
            elif run:
                parts.append(run)
                run = []
        if run:
            parts.append(run)
    return " ".join("M " + " L ".join(f"{_fmt(u)} {_fmt(v)}" for u, v in run) for run in parts if len(run) > 1)


def _draw_levels(group, m: GDSMapping, vp: Viewport, q: Point2):
    for lv in levels_through_point(m, q):
        (a1, a2), (c1, c2) = m.A[lv.index], m.P[lv.index]
        color = COLORS[lv.index % len(COLORS)]
        attrs = {"class": f"level-curve {lv.kind}", "fill": "none", "stroke": color,
                 "stroke-width": "1.5", "data-index": str(lv.index), "data-level": repr(lv.level)}
        cx, cy = vp.to_image((c1, c2))
        if lv.kind in ("circle", "ellipse", "single_point"):
            rx = math.sqrt(max(lv.level, 0.0) / a1) * vp.scale
            ry = math.sqrt(max(lv.level, 0.0) / a2) * vp.scale
            if lv.kind == "circle":
                ET.SubElement(group, "circle", {**attrs, "cx": _fmt(cx), "cy": _fmt(cy), "r": _fmt(rx)})
            else:
                ET.SubElement(group, "ellipse", {**attrs, "cx": _fmt(cx), "cy": _fmt(cy),
                                                 "rx": _fmt(rx), "ry": _fmt(ry)})
        else:
            ET.SubElement(group, "path", {**attrs, "d": _branch_paths(vp, a1, a2, c1, c2, lv.level)})


def render_figure(m: GDSMapping, points: Sequence = (), probe=None,
                  out: Optional[str | Path] = None) -> str:
    """SVG of the level curves through each tangency point, or through ``probe`` when there are none.

    Centers are drawn as filled dots and tangency points as ringed markers.
    The document is returned and, when ``out`` is given, written there.
    """
    points = [as_point(p) for p in points]
    if not points and probe is None:
        raise InvalidInput("nothing to depict: no singular points and no probe point")
    depicted = points if points else [as_point(probe)]
    vp = fit_viewport(m, depicted)

    svg = ET.Element("svg", {
        "xmlns": "http://www.w3.org/2000/svg",
        "width": _fmt(vp.width),
        "height": _fmt(vp.height),
        "viewBox": f"0 0 {_fmt(vp.width)} {_fmt(vp.height)}",
    })
    ET.SubElement(svg, "rect", {"x": "0", "y": "0", "width": _fmt(vp.width), "height": _fmt(vp.height),
                                "fill": "white"})
    for n, q in enumerate(depicted):
        group = ET.SubElement(svg, "g", {"class": "levels", "data-point": f"{q.x1!r},{q.x2!r}",
                                         "id": f"levels-{n}"})
        _draw_levels(group, m, vp, q)
    for i, p in enumerate(m.P):
        u, v = vp.to_image(p)
        ET.SubElement(svg, "circle", {"class": "center", "cx": _fmt(u), "cy": _fmt(v), "r": "3.5",
                                      "fill": COLORS[i % len(COLORS)]})
        label = ET.SubElement(svg, "text", {"x": _fmt(u + 6), "y": _fmt(v - 6), "font-size": "13",
                                            "font-family": "sans-serif"})
        label.text = f"p{i + 1}"
    for q in points:
        u, v = vp.to_image(q)
        ET.SubElement(svg, "circle", {"class": "tangency-marker", "cx": _fmt(u), "cy": _fmt(v), "r": "6",
                                      "fill": "none", "stroke": "black", "stroke-width": "2",
                                      "data-x1": repr(q.x1), "data-x2": repr(q.x2)})
    if not points:
        u, v = vp.to_image(depicted[0])
        ET.SubElement(svg, "circle", {"class": "probe", "cx": _fmt(u), "cy": _fmt(v), "r": "3",
                                      "fill": "gray"})

    ET.indent(svg)
    text = ET.tostring(svg, encoding="unicode") + "\n"
    if out is not None:
        Path(out).write_text(text)
    return text
