"""Raster containers, PNG/PPM/BMP codecs and detection overlays.

Rasters wrap read-only numpy arrays indexed ``[y, x]`` (row-major), so
``pixels[y, x]`` is the pixel at column ``x`` of row ``y``.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import TYPE_CHECKING, Union

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import BoundsError, DecodeError

if TYPE_CHECKING:
    from .detector import DetectionReport

SUPPORTED_FORMATS = ("PNG", "PPM", "BMP")

RED = (255, 0, 0)
BLUE = (0, 0, 255)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=np.uint8)
    if arr.flags.writeable:
        arr = arr.copy()
        arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class RgbRaster:
    """Colour image, ``pixels`` has shape (height, width, 3) and dtype uint8."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 3 or px.shape[2] != 3:
            raise ValueError(f"RGB raster needs shape (H, W, 3), got {px.shape}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("raster must be at least 1x1")
        _check_range(px)
        object.__setattr__(self, "pixels", _frozen(px))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __eq__(self, other):
        if not isinstance(other, RgbRaster):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class GrayRaster:
    """8-bit intensity image, ``pixels`` has shape (height, width)."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 2:
            raise ValueError(f"gray raster needs shape (H, W), got {px.shape}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("raster must be at least 1x1")
        _check_range(px)
        object.__setattr__(self, "pixels", _frozen(px))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @classmethod
    def filled(cls, width: int, height: int, value: int) -> "GrayRaster":
        return cls(np.full((height, width), value, dtype=np.uint8))

    def __eq__(self, other):
        if not isinstance(other, GrayRaster):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    __hash__ = None


Raster = Union[RgbRaster, GrayRaster]


def _check_range(px: np.ndarray) -> None:
    if px.dtype == np.uint8:
        return
    if not np.issubdtype(px.dtype, np.integer):
        raise ValueError(f"pixel values must be integers, got dtype {px.dtype}")
    if px.size and (px.min() < 0 or px.max() > 255):
        raise ValueError("pixel values must lie in 0..255")


def decode_image(data: bytes) -> RgbRaster:
    """Decode a PNG, PPM (P3/P6) or BMP payload into an RGB raster."""
    try:
        img = Image.open(io.BytesIO(data))
        if img.format not in SUPPORTED_FORMATS:
            raise DecodeError(f"unsupported image format {img.format!r}")
        img.load()
    except DecodeError:
        raise
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError, EOFError) as exc:
        raise DecodeError(f"cannot decode image: {exc}") from exc
    except Image.DecompressionBombError as exc:
        raise DecodeError(str(exc)) from exc

    if img.mode in ("1", "L", "P", "RGB", "RGBA", "LA"):
        img = img.convert("RGB")
    else:
        # 16-bit and float modes would silently lose precision
        raise DecodeError(f"unsupported pixel mode {img.mode!r}")
    return RgbRaster(np.asarray(img, dtype=np.uint8))


def read_image(path) -> RgbRaster:
    with open(path, "rb") as fh:
        return decode_image(fh.read())


def to_grayscale(img: Raster) -> GrayRaster:
    """Rec.601 luma, rounded half-up.

    Integer arithmetic keeps the rounding exact: gray images (R=G=B=v)
    map back to v for every v.
    """
    if isinstance(img, GrayRaster):
        return img
    px = img.pixels.astype(np.uint32)
    luma = (299 * px[..., 0] + 587 * px[..., 1] + 114 * px[..., 2] + 500) // 1000
    return GrayRaster(np.minimum(luma, 255).astype(np.uint8))


def _encode_png(arr: np.ndarray) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(arr).save(buf, format="PNG")
    return buf.getvalue()


def encode_gray(img: GrayRaster) -> bytes:
    """8-bit grayscale PNG bytes."""
    return _encode_png(img.pixels)


def encode_rgb(img: RgbRaster) -> bytes:
    """8-bit RGB PNG bytes."""
    return _encode_png(img.pixels)


def render_overlay(base: Raster, report: "DetectionReport") -> RgbRaster:
    """Outline accepted regions in red and fovea-sized rejects in blue.

    Only boundary pixels are recoloured; everything else is copied from
    ``base`` unchanged.  Gray bases are promoted to RGB by replication.
    """
    if isinstance(base, GrayRaster):
        out = np.repeat(base.pixels[:, :, None], 3, axis=2)
    else:
        out = base.pixels.copy()
    h, w = out.shape[:2]
    if report.width > w or report.height > h:
        raise BoundsError(
            f"report covers {report.width}x{report.height}, raster is {w}x{h}"
        )

    for det in report.detections:
        x0, y0, x1, y1 = det.props.bbox
        if min(x0, y0) < 0 or x1 >= w or y1 >= h:
            raise BoundsError(f"region {det.props.label} bbox {det.props.bbox} outside {w}x{h}")
        if det.verdict == "accepted":
            color = RED
        elif det.verdict == "rejected_fovea":
            color = BLUE
        else:
            continue
        pts = np.asarray(det.boundary, dtype=np.int64).reshape(-1, 2)
        if len(pts) == 0:
            continue
        xs, ys = pts[:, 0], pts[:, 1]
        if xs.min() < 0 or ys.min() < 0 or xs.max() >= w or ys.max() >= h:
            raise BoundsError(f"region {det.props.label} boundary outside {w}x{h}")
        out[ys, xs] = color
    return RgbRaster(out)
