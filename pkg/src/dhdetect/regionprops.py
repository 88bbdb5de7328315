"""Shape descriptors for labeled regions.

* area: pixel count
* perimeter: number of boundary pixels, i.e. region pixels with at least one
  4-neighbour that is background or off-raster
* diameter: largest distance between two pixel centres, found with a convex
  hull plus rotating calipers
* circularity: 4*pi*area / perimeter**2
* shape factor: area / diameter**2
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import DegenerateRegion
from .labeling import Region
from .segmentation import BinaryMask

Point = Tuple[int, int]

_NEIGHBORS_4 = ((1, 0), (-1, 0), (0, 1), (0, -1))


@dataclass(frozen=True)
class RegionProps:
    label: int
    area: int
    perimeter: int
    diameter: float
    circularity: float
    # None for single-pixel regions, whose diameter is zero
    shape_factor: Optional[float]
    centroid: Tuple[float, float]
    bbox: Tuple[int, int, int, int]

    @property
    def degenerate(self) -> bool:
        return self.shape_factor is None


def area(r: Region) -> int:
    return len(r.pixels)


def boundary_pixels(r: Region, mask: BinaryMask) -> np.ndarray:
    """Region pixels touching background or the raster edge through a 4-neighbour."""
    pts = np.asarray(r.pixels, dtype=np.int64)
    xs, ys = pts[:, 0], pts[:, 1]
    h, w = mask.bits.shape
    on_edge = np.zeros(len(pts), dtype=bool)
    for dx, dy in _NEIGHBORS_4:
        nx, ny = xs + dx, ys + dy
        inside = (nx >= 0) & (nx < w) & (ny >= 0) & (ny < h)
        bg = np.ones(len(pts), dtype=bool)
        bg[inside] = mask.bits[ny[inside], nx[inside]] == 0
        on_edge |= bg
    return pts[on_edge]


def perimeter(r: Region, mask: BinaryMask) -> int:
    return len(boundary_pixels(r, mask))


def _cross(o: Point, a: Point, b: Point) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _dist2(a: Point, b: Point) -> int:
    dx = a[0] - b[0]
    dy = a[1] - b[1]
    return dx * dx + dy * dy


def convex_hull(points: Sequence[Point]) -> List[Point]:
    """Andrew's monotone chain; counter-clockwise, collinear points dropped.

    Coordinates are integers so every orientation test is exact.
    """
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower: List[Point] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: List[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _row_extremes(pts: np.ndarray) -> List[Point]:
    # the hull of a pixel set equals the hull of each row's end points
    xs, ys = pts[:, 0], pts[:, 1]
    order = np.lexsort((xs, ys))
    xs, ys = xs[order], ys[order]
    first = np.ones(len(ys), dtype=bool)
    first[1:] = ys[1:] != ys[:-1]
    last = np.ones(len(ys), dtype=bool)
    last[:-1] = ys[1:] != ys[:-1]
    keep = first | last
    return list(zip(xs[keep].tolist(), ys[keep].tolist()))


def max_diameter_squared(points: Sequence[Point]) -> int:
    hull = convex_hull(points)
    n = len(hull)
    if n < 2:
        return 0
    if n == 2:
        return _dist2(hull[0], hull[1])
    best = 0
    j = 1
    for i in range(n):
        a, b = hull[i], hull[(i + 1) % n]
        # advance j while it moves further from edge a-b
        while _cross(a, b, hull[(j + 1) % n]) > _cross(a, b, hull[j]):
            j = (j + 1) % n
        k = (j + 1) % n
        best = max(best, _dist2(a, hull[j]), _dist2(b, hull[j]), _dist2(a, hull[k]), _dist2(b, hull[k]))
    return best


def max_diameter(r: Region) -> float:
    pts = np.asarray(r.pixels, dtype=np.int64)
    return math.sqrt(max_diameter_squared(_row_extremes(pts)))


def circularity(area: float, perimeter: float) -> float:
    if perimeter <= 0:
        raise DegenerateRegion("circularity undefined for zero perimeter")
    return 4.0 * math.pi * area / (perimeter * perimeter)


def shape_factor(area: float, diameter: float) -> float:
    if diameter <= 0:
        raise DegenerateRegion("shape factor undefined for zero diameter")
    return area / (diameter * diameter)


def compute_props(r: Region, mask: BinaryMask) -> RegionProps:
    pts = np.asarray(r.pixels, dtype=np.int64)
    n = len(pts)
    per = perimeter(r, mask)
    diam = max_diameter(r)
    sf = shape_factor(n, diam) if diam > 0 else None
    xs, ys = pts[:, 0], pts[:, 1]
    return RegionProps(
        label=int(r.label),
        area=n,
        perimeter=per,
        diameter=diam,
        circularity=circularity(n, per),
        shape_factor=sf,
        centroid=(int(xs.sum()) / n, int(ys.sum()) / n),
        bbox=(int(xs.min()), int(ys.min()), int(xs.max()), int(ys.max())),
    )
