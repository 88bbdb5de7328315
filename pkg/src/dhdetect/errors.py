"""Exception types raised by dhdetect."""


class DhDetectError(Exception):
    """Base class for all dhdetect errors."""


class DecodeError(DhDetectError):
    """The encoded image payload is malformed, truncated or unsupported."""


class BoundsError(DhDetectError, ValueError):
    """A coordinate or shape lies outside the target raster."""


class DegenerateRegion(DhDetectError, ValueError):
    """A descriptor denominator is zero (e.g. the diameter of a single pixel)."""


class PlacementError(DhDetectError):
    """The scene generator could not place a shape with the required separation."""


class ConfigError(DhDetectError, ValueError):
    """A detector parameter violates its allowed range."""
