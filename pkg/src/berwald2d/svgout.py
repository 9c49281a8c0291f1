"""Deterministic SVG-subset writer.

Only ``path``, ``circle`` and ``line`` elements are emitted, with fixed
number formatting, so the files can serve as diffable golden outputs.  The
viewport is the tight bounding box of the drawing plus a 10% margin; the
vertical axis is flipped so the drawing appears in the usual orientation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MARGIN = 0.10
CANVAS_WIDTH = 640.0
_FMT = "%.6f"


def _fmt(x: float) -> str:
    s = _FMT % x
    return "0.000000" if s == "-0.000000" else s


@dataclass
class SvgPath:
    points: np.ndarray  # (n, 2) in data coordinates
    closed: bool = False
    stroke: str = "#000000"
    width: float = 1.0
    dashed: bool = False


@dataclass
class SvgCircle:
    center: tuple
    radius: float
    fill: str = "#000000"


@dataclass
class SvgLine:
    start: tuple
    end: tuple
    stroke: str = "#888888"
    width: float = 0.5


@dataclass
class SvgCanvas:
    elements: list = field(default_factory=list)

    def add_path(self, points, closed=False, stroke="#000000", width=1.0, dashed=False):
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
            raise ValueError("path needs an (n, 2) array with n >= 2")
        self.elements.append(SvgPath(pts, closed, stroke, width, dashed))

    def add_circle(self, center, radius, fill="#000000"):
        self.elements.append(SvgCircle((float(center[0]), float(center[1])), float(radius), fill))

    def add_line(self, start, end, stroke="#888888", width=0.5):
        self.elements.append(
            SvgLine((float(start[0]), float(start[1])), (float(end[0]), float(end[1])), stroke, width)
        )

    def _bounds(self):
        xs, ys = [], []
        for el in self.elements:
            if isinstance(el, SvgPath):
                xs.extend(el.points[:, 0])
                ys.extend(el.points[:, 1])
            elif isinstance(el, SvgCircle):
                xs.extend([el.center[0] - el.radius, el.center[0] + el.radius])
                ys.extend([el.center[1] - el.radius, el.center[1] + el.radius])
            else:
                xs.extend([el.start[0], el.end[0]])
                ys.extend([el.start[1], el.end[1]])
        if not xs:
            raise ValueError("empty canvas")
        return min(xs), max(xs), min(ys), max(ys)

    def to_string(self) -> str:
        xmin, xmax, ymin, ymax = self._bounds()
        dx = max(xmax - xmin, 1e-9)
        dy = max(ymax - ymin, 1e-9)
        mx, my = MARGIN * dx, MARGIN * dy
        xmin, xmax = xmin - mx, xmax + mx
        ymin, ymax = ymin - my, ymax + my
        width = xmax - xmin
        height = ymax - ymin
        scale = CANVAS_WIDTH / width
        px_h = height * scale
        # data (x, y) -> svg (x, -y); viewBox covers the flipped box
        view = " ".join(_fmt(v) for v in (xmin, -ymax, width, height))
        stroke_scale = width / CANVAS_WIDTH  # keep ~1px strokes in data units
        lines = [
            '<svg xmlns="http://www.w3.org/2000/svg" '
            f'width="{_fmt(CANVAS_WIDTH)}" height="{_fmt(px_h)}" '
            f'viewBox="{view}">'
        ]
        for el in self.elements:
            if isinstance(el, SvgPath):
                cmds = []
                for i, (x, y) in enumerate(el.points):
                    cmds.append(("M" if i == 0 else "L") + f" {_fmt(x)} {_fmt(-y)}")
                if el.closed:
                    cmds.append("Z")
                dash = ""
                if el.dashed:
                    d = _fmt(6.0 * stroke_scale)
                    dash = f' stroke-dasharray="{d} {d}"'
                lines.append(
                    f'<path d="{" ".join(cmds)}" fill="none" stroke="{el.stroke}" '
                    f'stroke-width="{_fmt(el.width * stroke_scale)}"{dash}/>'
                )
            elif isinstance(el, SvgCircle):
                lines.append(
                    f'<circle cx="{_fmt(el.center[0])}" cy="{_fmt(-el.center[1])}" '
                    f'r="{_fmt(el.radius)}" fill="{el.fill}"/>'
                )
            else:
                lines.append(
                    f'<line x1="{_fmt(el.start[0])}" y1="{_fmt(-el.start[1])}" '
                    f'x2="{_fmt(el.end[0])}" y2="{_fmt(-el.end[1])}" '
                    f'stroke="{el.stroke}" stroke-width="{_fmt(el.width * stroke_scale)}"/>'
                )
        lines.append("</svg>")
        return "\n".join(lines) + "\n"

    def write(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_string())
