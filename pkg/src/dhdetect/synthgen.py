"""Synthetic fundus-like scenes with known ground truth, plus a brute-force
descriptor oracle used to cross-check :mod:`dhdetect.regionprops`.

Scenes are drawn with numpy's ``default_rng(seed)``, i.e. the PCG64
generator, so a seed reproduces the same raster on any platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np

from .errors import BoundsError, PlacementError
from .raster_io import GrayRaster
from .regionprops import RegionProps

BACKGROUND = 200
DARK = 5
# minimum pixel-centre distance between shapes: leaves >= 5 background pixels
SEPARATION = 6
MAX_ATTEMPTS = 1000

DH_RADIUS = (4, 10)
FOVEA_RADIUS = (25, 35)
VESSEL_HALF_WIDTH = (1, 2)
VESSEL_LENGTH = (25, 80)

KINDS = ("disk", "rect", "capsule")
_ARITY = {"disk": 3, "rect": 4, "capsule": 5}


@dataclass(frozen=True)
class ShapeSpec:
    """``params`` is (cx, cy, r) for disks, inclusive (x0, y0, x1, y1) for
    rects and (x0, y0, x1, y1, half_width) for capsules."""

    kind: str
    params: Tuple[int, ...]
    intensity: int = DARK

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown shape kind {self.kind!r}")
        params = tuple(int(p) for p in self.params)
        if len(params) != _ARITY[self.kind]:
            raise ValueError(f"{self.kind} takes {_ARITY[self.kind]} parameters, got {len(params)}")
        if self.kind == "disk" and params[2] < 1:
            raise ValueError("disk radius must be >= 1")
        if self.kind == "capsule" and params[4] < 1:
            raise ValueError("capsule half_width must be >= 1")
        if self.kind == "rect" and (params[2] < params[0] or params[3] < params[1]):
            raise ValueError("rect corners must satisfy x0 <= x1 and y0 <= y1")
        if not 0 <= self.intensity <= 255:
            raise ValueError("intensity must be in 0..255")
        object.__setattr__(self, "params", params)

    def grown(self, margin: int) -> "ShapeSpec":
        """Same shape with every radius (or rect side) pushed out by ``margin``."""
        p = self.params
        if self.kind == "disk":
            return ShapeSpec("disk", (p[0], p[1], p[2] + margin), self.intensity)
        if self.kind == "capsule":
            return ShapeSpec("capsule", p[:4] + (p[4] + margin,), self.intensity)
        return ShapeSpec(
            "rect", (p[0] - margin, p[1] - margin, p[2] + margin, p[3] + margin), self.intensity
        )

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": list(self.params), "intensity": self.intensity}

    @classmethod
    def from_dict(cls, d: dict) -> "ShapeSpec":
        return cls(d["kind"], tuple(d["params"]), d["intensity"])


def shape_pixels(spec: ShapeSpec) -> Tuple[np.ndarray, np.ndarray]:
    """(xs, ys) of every lattice point covered by the shape, unclipped."""
    p = spec.params
    if spec.kind == "rect":
        x0, y0, x1, y1 = p
        ys, xs = np.mgrid[y0:y1 + 1, x0:x1 + 1]
        return xs.ravel(), ys.ravel()

    if spec.kind == "disk":
        cx, cy, r = p
        ys, xs = np.mgrid[cy - r:cy + r + 1, cx - r:cx + r + 1]
        keep = (xs - cx) ** 2 + (ys - cy) ** 2 <= r * r
        return xs[keep], ys[keep]

    x0, y0, x1, y1, hw = p
    ys, xs = np.mgrid[min(y0, y1) - hw:max(y0, y1) + hw + 1, min(x0, x1) - hw:max(x0, x1) + hw + 1]
    dx, dy = x1 - x0, y1 - y0
    seg2 = dx * dx + dy * dy
    vx, vy = xs - x0, ys - y0
    v2 = vx * vx + vy * vy
    if seg2 == 0:
        keep = v2 <= hw * hw
    else:
        # exact integer distance-to-segment test
        t = vx * dx + vy * dy
        w2 = (xs - x1) ** 2 + (ys - y1) ** 2
        mid = v2 * seg2 - t * t <= hw * hw * seg2
        keep = np.where(t <= 0, v2 <= hw * hw, np.where(t >= seg2, w2 <= hw * hw, mid))
    return xs[keep], ys[keep]


def rasterize(spec: ShapeSpec, canvas: GrayRaster) -> GrayRaster:
    xs, ys = shape_pixels(spec)
    if xs.min() < 0 or ys.min() < 0 or xs.max() >= canvas.width or ys.max() >= canvas.height:
        raise BoundsError(f"{spec.kind} {spec.params} exceeds {canvas.width}x{canvas.height} canvas")
    out = canvas.pixels.copy()
    out[ys, xs] = spec.intensity
    return GrayRaster(out)


@dataclass(frozen=True)
class SceneTruth:
    shapes: Tuple[ShapeSpec, ...]
    dh_labels: Tuple[int, ...]
    width: int = 0
    height: int = 0
    seed: int = 0
    background: int = BACKGROUND

    @property
    def dh_shapes(self):
        return [self.shapes[i] for i in self.dh_labels]

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "width": self.width,
            "height": self.height,
            "background": self.background,
            "shapes": [s.to_dict() for s in self.shapes],
            "dh_labels": list(self.dh_labels),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SceneTruth":
        return cls(
            shapes=tuple(ShapeSpec.from_dict(s) for s in d["shapes"]),
            dh_labels=tuple(d["dh_labels"]),
            width=d["width"],
            height=d["height"],
            seed=d["seed"],
            background=d["background"],
        )


def _fits(spec: ShapeSpec, width: int, height: int) -> bool:
    xs, ys = shape_pixels(spec)
    # one pixel of margin keeps shapes off the raster edge
    return xs.min() >= 1 and ys.min() >= 1 and xs.max() <= width - 2 and ys.max() <= height - 2


def _clear(spec: ShapeSpec, occupied: np.ndarray) -> bool:
    xs, ys = shape_pixels(spec.grown(SEPARATION))
    h, w = occupied.shape
    inside = (xs >= 0) & (xs < w) & (ys >= 0) & (ys < h)
    return not occupied[ys[inside], xs[inside]].any()


def _random_disk(rng, width, height, radius_range):
    r = int(rng.integers(radius_range[0], radius_range[1] + 1))
    cx = int(rng.integers(r + 1, max(r + 2, width - r - 1)))
    cy = int(rng.integers(r + 1, max(r + 2, height - r - 1)))
    return ShapeSpec("disk", (cx, cy, r), DARK)


def _random_capsule(rng, width, height):
    hw = int(rng.integers(VESSEL_HALF_WIDTH[0], VESSEL_HALF_WIDTH[1] + 1))
    length = int(rng.integers(VESSEL_LENGTH[0], VESSEL_LENGTH[1] + 1))
    angle = float(rng.uniform(0.0, math.pi))
    x0 = int(rng.integers(0, width))
    y0 = int(rng.integers(0, height))
    x1 = x0 + int(round(length * math.cos(angle)))
    y1 = y0 + int(round(length * math.sin(angle)))
    return ShapeSpec("capsule", (x0, y0, x1, y1, hw), DARK)


def _capsule_length_ok(spec: ShapeSpec) -> bool:
    x0, y0, x1, y1, _ = spec.params
    return VESSEL_LENGTH[0] <= math.hypot(x1 - x0, y1 - y0) <= VESSEL_LENGTH[1]


def generate_scene(
    seed: int,
    width: int = 466,
    height: int = 489,
    n_dh: int = 3,
    n_vessels: int = 2,
    with_fovea: bool = True,
) -> Tuple[GrayRaster, SceneTruth]:
    """Background 200 with dark (intensity 5) disks, capsules and a fovea.

    Shapes are placed largest first (fovea, vessels, hemorrhages) and are
    pairwise at least ``SEPARATION`` pixel centres apart.
    """
    if n_dh < 0 or n_vessels < 0:
        raise ValueError("shape counts must be non-negative")
    if width < 1 or height < 1:
        raise ValueError("scene dimensions must be positive")
    rng = np.random.default_rng(seed)
    occupied = np.zeros((height, width), dtype=bool)
    pixels = np.full((height, width), BACKGROUND, dtype=np.uint8)
    shapes = []
    dh_labels = []

    def place(make, extra_ok=lambda s: True):
        for _ in range(MAX_ATTEMPTS):
            spec = make()
            if extra_ok(spec) and _fits(spec, width, height) and _clear(spec, occupied):
                xs, ys = shape_pixels(spec)
                occupied[ys, xs] = True
                pixels[ys, xs] = spec.intensity
                shapes.append(spec)
                return
        raise PlacementError(
            f"could not place shape {len(shapes)} in {width}x{height} after {MAX_ATTEMPTS} attempts"
        )

    if with_fovea:
        place(lambda: _random_disk(rng, width, height, FOVEA_RADIUS))
    for _ in range(n_vessels):
        place(lambda: _random_capsule(rng, width, height), _capsule_length_ok)
    for _ in range(n_dh):
        dh_labels.append(len(shapes))
        place(lambda: _random_disk(rng, width, height, DH_RADIUS))

    truth = SceneTruth(tuple(shapes), tuple(dh_labels), width, height, seed, BACKGROUND)
    return GrayRaster(pixels), truth


def _max_dist2_brute(xs: np.ndarray, ys: np.ndarray, block: int = 1024) -> int:
    best = 0
    for start in range(0, len(xs), block):
        bx = xs[start:start + block, None]
        by = ys[start:start + block, None]
        d2 = (bx - xs[None, :]) ** 2 + (by - ys[None, :]) ** 2
        best = max(best, int(d2.max()))
    return best


def oracle_props(pixels: Iterable[Tuple[int, int]], label: int = 1) -> RegionProps:
    """Descriptors by direct enumeration: set lookups for the perimeter and
    all-pairs distances for the diameter."""
    pts = {(int(x), int(y)) for x, y in pixels}
    if not pts:
        raise ValueError("oracle needs a non-empty pixel set")
    n = len(pts)
    edge = 0
    for x, y in pts:
        if (x + 1, y) not in pts or (x - 1, y) not in pts or (x, y + 1) not in pts or (x, y - 1) not in pts:
            edge += 1
    arr = np.array(sorted(pts), dtype=np.int64)
    xs, ys = arr[:, 0], arr[:, 1]
    diam = math.sqrt(_max_dist2_brute(xs, ys))
    return RegionProps(
        label=label,
        area=n,
        perimeter=edge,
        diameter=diam,
        circularity=4.0 * math.pi * n / (edge * edge),
        shape_factor=n / (diam * diam) if diam > 0 else None,
        centroid=(sum(x for x, _ in pts) / n, sum(y for _, y in pts) / n),
        bbox=(min(x for x, _ in pts), min(y for _, y in pts), max(x for x, _ in pts), max(y for _, y in pts)),
    )
