"""Exception types shared across the package.

Loader/config failures map onto CLI exit codes (config -> 2, data -> 3).
"""


class ConfigError(Exception):
    """A configuration file or parameter set is invalid or unusable."""


class DataError(Exception):
    """A dataset, frame, or on-disk artifact is missing or malformed."""


class DimensionError(ValueError):
    """An image or frame is too small for the requested operation."""


class GeometryMismatchError(ValueError):
    """Two frames/maps that must share a pixel grid do not."""


class GridMismatchError(GeometryMismatchError):
    """Probability and cluster maps disagree on the HS grid."""


class LayoutError(ValueError):
    """A cube is in the wrong memory layout for this operation."""


class FeatureMismatchError(ValueError):
    """Sample feature count does not match the model's feature count."""


class DegenerateDataError(ValueError):
    """Training data cannot support the requested model (e.g. one class)."""


class SingleClassError(ValueError):
    """A ranking metric was given samples from only one class."""


class ClusterCountError(ValueError):
    """Requested cluster count exceeds what the data supports."""


class CameraError(ValueError):
    """A camera model violates its invariants (singular K, bad rotation...)."""


class EmptyDepthError(ValueError):
    """A depth frame with no valid samples where at least one is required."""


class EmptyMaskError(ValueError):
    """A scoring mask selects no pixels."""


class MissingViewError(DataError):
    """A multiview dataset lacks a required view."""


class WireFormatError(ValueError):
    """A streamed frame fails magic/version/length checks."""
