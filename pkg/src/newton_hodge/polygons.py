"""Newton and Hodge polygons with exact rational vertices."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

INFINITY = math.inf


@dataclass(frozen=True)
class Polygon:
    """Lower convex polygon through its vertices, starting at (0, 0)."""

    vertices: tuple[tuple[int, Fraction], ...]

    def __post_init__(self):
        vs = self.vertices
        if not vs or vs[0] != (0, 0):
            raise ValueError("polygon must start at the origin")
        slopes = [Fraction(y1 - y0) / (x1 - x0) for (x0, y0), (x1, y1) in zip(vs, vs[1:])]
        if any(x1 <= x0 for (x0, _), (x1, _) in zip(vs, vs[1:])):
            raise ValueError("vertex abscissae must increase")
        if any(s1 <= s0 for s0, s1 in zip(slopes, slopes[1:])):
            raise ValueError("slopes must strictly increase")

    @property
    def width(self) -> int:
        return self.vertices[-1][0]

    @property
    def endpoint(self) -> tuple[int, Fraction]:
        return self.vertices[-1]

    def __call__(self, x) -> Fraction:
        vs = self.vertices
        if not 0 <= x <= self.width:
            raise ValueError(f"{x} outside [0, {self.width}]")
        for (x0, y0), (x1, y1) in zip(vs, vs[1:]):
            if x0 <= x <= x1:
                return y0 + (y1 - y0) * Fraction(x - x0, x1 - x0)
        return vs[-1][1]

    def slopes(self) -> list[Fraction]:
        """Slope multiset, each slope repeated by its horizontal length."""
        out = []
        for s, length in slope_segments(self):
            out.extend([s] * length)
        return out

    def scaled(self, x_factor: Fraction, y_factor: Fraction) -> Polygon:
        vs = []
        for x, y in self.vertices:
            xs = Fraction(x) * x_factor
            if xs.denominator != 1:
                raise ValueError("scaling leaves integer abscissae")
            vs.append((int(xs), Fraction(y) * y_factor))
        return Polygon(tuple(vs))

    def truncated(self, width: int) -> Polygon:
        """Restriction to [0, width]; width must be a vertex abscissa."""
        vs = tuple(v for v in self.vertices if v[0] <= width)
        if vs[-1][0] != width:
            raise ValueError(f"{width} is not a vertex abscissa")
        return Polygon(vs)

    def to_csv(self) -> str:
        return "x,y_num,y_den\n" + "".join(f"{x},{y.numerator},{y.denominator}\n" for x, y in self.vertices)

    def __repr__(self) -> str:
        return "Polygon(" + ", ".join(f"({x}, {y})" for x, y in self.vertices) + ")"


def _cross(o, a, b) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def lower_hull(points: Iterable[tuple[int, object]]) -> Polygon:
    """Lower convex hull of points (x, y); points with y = INFINITY are
    skipped.  The origin must be among the points."""
    pts = []
    seen = set()
    for x, y in points:
        if x in seen:
            raise ValueError(f"duplicate abscissa {x}")
        seen.add(x)
        if y is None or y == INFINITY:
            continue
        pts.append((int(x), Fraction(y)))
    pts.sort()
    if not pts or pts[0] != (0, 0):
        raise ValueError("points must include the origin (0, 0)")
    hull: list[tuple[int, Fraction]] = []
    for pt in pts:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], pt) <= 0:
            hull.pop()
        hull.append(pt)
    return Polygon(tuple(hull))


def polygon_from_slopes(slopes: Iterable[Fraction]) -> Polygon:
    x, y = 0, Fraction(0)
    pts = [(0, Fraction(0))]
    for s in sorted(Fraction(s) for s in slopes):
        x, y = x + 1, y + s
        pts.append((x, y))
    return lower_hull(pts)


def hodge_slopes(orders: Sequence[int]) -> list[Fraction]:
    ell = len(orders)
    slopes = [Fraction(0)] * (ell - 1) + [Fraction(1)] * (ell - 1)
    for d in orders:
        slopes.extend(Fraction(i, d) for i in range(1, d))
    return sorted(slopes)


def hodge_polygon(orders: Sequence[int]) -> Polygon:
    if not orders or any(d < 1 for d in orders):
        raise ValueError("pole orders must be positive")
    if len(orders) == 1 and orders[0] == 1:
        raise ValueError("trivial case d_1 = l = 1 has no Hodge polygon")
    return polygon_from_slopes(hodge_slopes(orders))


def lies_over(P: Polygon, Q: Polygon) -> bool:
    """True iff P(x) >= Q(x) on the common domain."""
    if P.width != Q.width:
        raise ValueError(f"endpoint mismatch: {P.width} vs {Q.width}")
    xs = {x for x, _ in P.vertices} | {x for x, _ in Q.vertices}
    return all(P(x) >= Q(x) for x in xs)


def slope_segments(P: Polygon) -> list[tuple[Fraction, int]]:
    out = []
    for (x0, y0), (x1, y1) in zip(P.vertices, P.vertices[1:]):
        out.append((Fraction(y1 - y0) / (x1 - x0), x1 - x0))
    return out


def extend_by_slope(P: Polygon, slope: Fraction, length: int) -> Polygon:
    x, y = P.endpoint
    pts = list(P.vertices)
    for _ in range(length):
        x, y = x + 1, y + slope
        pts.append((x, y))
    return lower_hull(pts)


def to_svg(polygons: dict[str, Polygon], scale: int = 60) -> str:
    """Minimal SVG overlay, one polyline per named polygon."""
    colors = ["#c0392b", "#2471a3", "#229954", "#7d3c98"]
    width = max(P.width for P in polygons.values())
    height = max(float(P.endpoint[1]) for P in polygons.values())
    w, h = int(width * scale) + 40, int(height * scale) + 40
    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">']
    for (name, P), color in zip(sorted(polygons.items()), colors * 4):
        pts = " ".join(f"{20 + x * scale:.2f},{h - 20 - float(y) * scale:.2f}" for x, y in P.vertices)
        lines.append(
            f'  <polyline fill="none" stroke="{color}" stroke-width="2" points="{pts}">'
            f"<title>{name}</title></polyline>"
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
