"""Dot hemorrhage detection pipeline.

gray -> binarize -> label -> per-region descriptors -> classify.  Each region
is rejected by the first test it fails, in this order: fovea-sized area,
too small, single pixel, circularity, shape factor.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import List, Tuple

from .errors import ConfigError
from .labeling import extract_regions, label_components
from .raster_io import Raster, to_grayscale
from .regionprops import RegionProps, boundary_pixels, compute_props
from .segmentation import binarize, check_threshold

ACCEPTED = "accepted"
REJECTED_FOVEA = "rejected_fovea"
REJECTED_SMALL = "rejected_small"
REJECTED_DEGENERATE = "rejected_degenerate"
REJECTED_CIRCULARITY = "rejected_circularity"
REJECTED_SHAPE_FACTOR = "rejected_shape_factor"

VERDICTS = (
    ACCEPTED,
    REJECTED_FOVEA,
    REJECTED_SMALL,
    REJECTED_DEGENERATE,
    REJECTED_CIRCULARITY,
    REJECTED_SHAPE_FACTOR,
)


@dataclass(frozen=True)
class DetectorConfig:
    threshold: int = 12
    fovea_fraction: float = 0.0046
    min_area: int = 4
    connectivity: int = 8
    circ_min: float = 1.0
    # band around pi/4, the shape factor of a disk
    sf_min: float = 0.70
    sf_max: float = 0.90

    def __post_init__(self):
        check_threshold(self.threshold)
        if not 0 < self.fovea_fraction < 1:
            raise ConfigError(f"fovea_fraction must be in (0, 1), got {self.fovea_fraction}")
        if isinstance(self.min_area, bool) or not isinstance(self.min_area, int) or self.min_area < 1:
            raise ConfigError(f"min_area must be an integer >= 1, got {self.min_area}")
        if self.connectivity not in (4, 8):
            raise ConfigError(f"connectivity must be 4 or 8, got {self.connectivity}")
        if not math.isfinite(self.circ_min):
            raise ConfigError("circ_min must be finite")
        if not 0 < self.sf_min < self.sf_max:
            raise ConfigError(
                f"need 0 < sf_min < sf_max, got sf_min={self.sf_min} sf_max={self.sf_max}"
            )


@dataclass(frozen=True)
class Detection:
    props: RegionProps
    verdict: str
    # (x, y) boundary pixels, kept for overlays only; not serialized
    boundary: Tuple[Tuple[int, int], ...] = field(default=(), compare=False, repr=False)


@dataclass(frozen=True)
class DetectionReport:
    image_id: str
    width: int
    height: int
    config: DetectorConfig
    fovea_area_threshold: int
    detections: Tuple[Detection, ...]

    @property
    def accepted(self) -> List[Detection]:
        return [d for d in self.detections if d.verdict == ACCEPTED]

    @property
    def dh_count(self) -> int:
        return len(self.accepted)

    @property
    def total_dh_area(self) -> int:
        return sum(d.props.area for d in self.accepted)

    @property
    def region_count(self) -> int:
        return len(self.detections)

    def to_dict(self) -> dict:
        return {
            "image": self.image_id,
            "width": self.width,
            "height": self.height,
            "config": {k: _sig6(v) for k, v in asdict(self.config).items()},
            "fovea_area_threshold": self.fovea_area_threshold,
            "dh_count": self.dh_count,
            "total_dh_area": self.total_dh_area,
            "detections": [_detection_dict(d) for d in self.detections],
        }

    def to_json(self, indent=2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, data: dict) -> "DetectionReport":
        dets = []
        for d in data["detections"]:
            if d["verdict"] not in VERDICTS:
                raise ValueError(f"unknown verdict {d['verdict']!r}")
            props = RegionProps(
                label=d["label"],
                area=d["area"],
                perimeter=d["perimeter"],
                diameter=float(d["diameter"]),
                circularity=float(d["circularity"]),
                shape_factor=None if d["shape_factor"] is None else float(d["shape_factor"]),
                centroid=(float(d["centroid"][0]), float(d["centroid"][1])),
                bbox=tuple(d["bbox"]),
            )
            dets.append(Detection(props, d["verdict"]))
        cfg = data["config"]
        report = cls(
            image_id=data["image"],
            width=data["width"],
            height=data["height"],
            config=DetectorConfig(
                threshold=cfg["threshold"],
                fovea_fraction=float(cfg["fovea_fraction"]),
                min_area=cfg["min_area"],
                connectivity=cfg["connectivity"],
                circ_min=float(cfg["circ_min"]),
                sf_min=float(cfg["sf_min"]),
                sf_max=float(cfg["sf_max"]),
            ),
            fovea_area_threshold=data["fovea_area_threshold"],
            detections=tuple(dets),
        )
        if report.dh_count != data["dh_count"] or report.total_dh_area != data["total_dh_area"]:
            raise ValueError("dh_count/total_dh_area disagree with the detection list")
        return report

    @classmethod
    def from_json(cls, text: str) -> "DetectionReport":
        return cls.from_dict(json.loads(text))


def _sig6(v):
    if isinstance(v, float):
        return float(f"{v:.6g}")
    return v


def _detection_dict(d: Detection) -> dict:
    p = d.props
    return {
        "label": p.label,
        "verdict": d.verdict,
        "area": p.area,
        "perimeter": p.perimeter,
        "diameter": _sig6(p.diameter),
        "circularity": _sig6(p.circularity),
        "shape_factor": None if p.shape_factor is None else _sig6(p.shape_factor),
        "centroid": [_sig6(p.centroid[0]), _sig6(p.centroid[1])],
        "bbox": list(p.bbox),
    }


def fovea_area_threshold(width: int, height: int, fovea_fraction: float) -> int:
    """Area (pixels) at or above which a region counts as the fovea.

    Rounds half-up; ``round()`` would apply banker's rounding.
    """
    if width < 1 or height < 1:
        raise ValueError("image dimensions must be positive")
    if not 0 < fovea_fraction < 1:
        raise ConfigError(f"fovea_fraction must be in (0, 1), got {fovea_fraction}")
    return int(math.floor(fovea_fraction * width * height + 0.5))


def classify_region(props: RegionProps, fovea_area: int, cfg: DetectorConfig) -> Detection:
    if props.area >= fovea_area:
        verdict = REJECTED_FOVEA
    elif props.area < cfg.min_area:
        verdict = REJECTED_SMALL
    elif props.degenerate:
        verdict = REJECTED_DEGENERATE
    elif props.circularity < cfg.circ_min:
        verdict = REJECTED_CIRCULARITY
    elif not cfg.sf_min <= props.shape_factor <= cfg.sf_max:
        verdict = REJECTED_SHAPE_FACTOR
    else:
        verdict = ACCEPTED
    return Detection(props, verdict)


def detect(img: Raster, cfg: DetectorConfig = DetectorConfig(), image_id: str = "") -> DetectionReport:
    gray = to_grayscale(img)
    mask = binarize(gray, cfg.threshold)
    lm = label_components(mask, cfg.connectivity)
    fovea_area = fovea_area_threshold(gray.width, gray.height, cfg.fovea_fraction)

    detections = []
    for region in extract_regions(lm):
        det = classify_region(compute_props(region, mask), fovea_area, cfg)
        if det.verdict in (ACCEPTED, REJECTED_FOVEA):
            edge = boundary_pixels(region, mask)
            det = Detection(det.props, det.verdict, tuple(map(tuple, edge.tolist())))
        detections.append(det)

    return DetectionReport(
        image_id=image_id,
        width=gray.width,
        height=gray.height,
        config=cfg,
        fovea_area_threshold=fovea_area,
        detections=tuple(detections),
    )
