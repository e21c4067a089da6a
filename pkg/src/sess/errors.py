"""Exception types raised by the scoring engine and its I/O layer."""


class SessError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(SessError):
    """Two vectors or matrices that must agree in shape do not."""


class ZeroVector(SessError):
    """A cosine similarity was requested against an all-zero vector."""


class NonFiniteEntry(SessError):
    """A weight matrix contains NaN or infinity."""


class NegativeEntry(SessError):
    """A weight matrix contains a negative entry."""


class TooLarge(SessError):
    """A brute-force search was requested on a problem beyond its size cap."""


class EmptyImage(SessError):
    """An operation needed pixel data but the image has no pixels."""


class NoNodes(SessError):
    """An operation needed at least one graph node but got none."""


class ShapeMismatch(SessError):
    """Two rasters that must share height/width/channels do not."""


class TooSmall(SessError):
    """An image is smaller than the sliding window it must support."""


class EmptySet(SessError):
    """A patch embedding set with zero rows was passed where rows are required."""


class MissingGraphFile(SessError):
    """An annotation record points at a graph file that cannot be loaded."""


class InsufficientPairs(SessError):
    """A correlation was requested over fewer than two score pairs."""


class UnsupportedFormat(SessError):
    """A raster file is not one of the supported encodings."""


class CorruptFile(SessError):
    """A file matched a supported format but its contents are malformed."""
