"""SVG diagram of the A/B/C regions in the (1/p, 1/q) unit square.

The axes fill the whole 640 x 640 canvas, so a point ``(u, v)`` lands at
user coordinates ``(640 u, 640 (1 - v))`` (origin bottom-left in the data,
top-left in SVG).
"""

from __future__ import annotations

import io
from typing import Optional, Tuple

import matplotlib
from matplotlib.backends.backend_svg import FigureCanvasSVG
from matplotlib.figure import Figure
from matplotlib.patches import Polygon

from .exponents import Point, region_vertices

SIZE = 640
COLORS = {"A": "#4477aa", "B": "#66ccee", "C": "#ee6677"}


def to_canvas(point: Tuple[float, float]) -> Tuple[float, float]:
    u, v = point
    return (SIZE * float(u), SIZE * (1.0 - float(v)))


def render_regions_svg(m: int, point: Optional[Point] = None) -> str:
    regions = region_vertices(m)
    with matplotlib.rc_context({"svg.hashsalt": "caustic-bench", "svg.fonttype": "path"}):
        fig = Figure(figsize=(SIZE / 72, SIZE / 72), dpi=72)
        FigureCanvasSVG(fig)
        ax = fig.add_axes((0, 0, 1, 1))
        ax.set_xlim(0, 1)
        ax.set_ylim(0, 1)
        ax.set_axis_off()
        for key, region in regions.items():
            verts = [(float(u), float(v)) for u, v in region.vertices]
            ax.add_patch(Polygon(verts, closed=True, facecolor=COLORS[key], edgecolor="black",
                                 linewidth=0.8, gid=f"region-{region.label}"))
            cu = sum(x for x, _ in verts) / len(verts)
            cv = sum(y for _, y in verts) / len(verts)
            ax.text(cu, cv, region.label, ha="center", va="center", fontsize=14)
        ax.plot([0, 1], [0, 1], color="black", linewidth=0.5, linestyle=":")
        if point is not None:
            ax.plot([float(point[0])], [float(point[1])], marker="o", color="black", markersize=6,
                    gid="query-point")
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None, "Creator": None})
    return buf.getvalue()


def write_regions_svg(path: str, m: int, point: Optional[Point] = None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_regions_svg(m, point))
