"""Fixed-threshold binarization of gray rasters."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .raster_io import GrayRaster

DEFAULT_THRESHOLD = 12


@dataclass(frozen=True, eq=False)
class BinaryMask:
    """Foreground mask; ``bits`` is a read-only uint8 array of 0/1 values."""

    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits)
        if bits.ndim != 2:
            raise ValueError(f"mask needs shape (H, W), got {bits.shape}")
        if bits.dtype == bool:
            bits = bits.astype(np.uint8)
        elif bits.size and not np.isin(bits, (0, 1)).all():
            raise ValueError("mask values must be 0 or 1")
        bits = np.ascontiguousarray(bits, dtype=np.uint8)
        if bits.flags.writeable:
            bits = bits.copy()
            bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def count(self) -> int:
        return int(np.count_nonzero(self.bits))

    def __eq__(self, other):
        if not isinstance(other, BinaryMask):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    __hash__ = None


def check_threshold(t: int) -> int:
    if isinstance(t, bool) or not isinstance(t, (int, np.integer)):
        raise ConfigError(f"threshold must be an integer, got {t!r}")
    if not 0 <= t <= 255:
        raise ConfigError(f"threshold must be in 0..255, got {t}")
    return int(t)


def binarize(img: GrayRaster, t: int = DEFAULT_THRESHOLD) -> BinaryMask:
    """Mark every pixel with intensity <= ``t`` as foreground (dark candidate)."""
    t = check_threshold(t)
    return BinaryMask(img.pixels <= t)
