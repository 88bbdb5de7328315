"""Dot hemorrhage detection in retinal fundus images by shape recognition."""

from .detector import (
    Detection,
    DetectionReport,
    DetectorConfig,
    classify_region,
    detect,
    fovea_area_threshold,
)
from .errors import BoundsError, ConfigError, DecodeError, DegenerateRegion, PlacementError
from .labeling import LabelMap, Region, UnionFind, extract_regions, label_components
from .raster_io import (
    GrayRaster,
    RgbRaster,
    decode_image,
    encode_gray,
    encode_rgb,
    read_image,
    render_overlay,
    to_grayscale,
)
from .regionprops import (
    RegionProps,
    area,
    circularity,
    compute_props,
    max_diameter,
    perimeter,
    shape_factor,
)
from .segmentation import BinaryMask, binarize

__version__ = "0.1.0"
