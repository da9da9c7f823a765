"""Errors raised by the iris pipeline.

Every error derives from ``IrisError`` so the management commands can tell
pipeline failures apart from programming errors.
"""


class IrisError(Exception):
    """Base class for all pipeline errors"""


class ConfigError(IrisError):
    """Run configuration is malformed or references missing inputs"""


class ImageFormatError(IrisError):
    """Image file cannot be decoded into a grayscale raster"""


# geometry
class InvalidImage(IrisError):
    """Image has no pixels or values outside [0, 1]"""


class InvalidGeometry(IrisError):
    """Circle parameters or polar resolution cannot be normalized"""


class EmptyMask(IrisError):
    """Mask contains no iris pixel"""


# templates
class InvalidTemplate(IrisError):
    """Template payload violates its invariants"""


class NotATemplate(IrisError):
    """Byte sequence does not start with the template magic"""


class UnsupportedVersion(IrisError):
    """Template container version is not understood"""


class Corrupt(IrisError):
    """Template bytes are truncated or inconsistent with the header"""


# matching
class IncompatibleTemplates(IrisError):
    """Templates differ in kind, metric or dimensions"""


class BadFilterFile(IrisError):
    """Filter bank file does not follow the HDBIF-FILTERS format"""


class KernelTooLarge(IrisError):
    """Filter kernel does not fit into the normalized iris"""


class InsufficientOverlap(IrisError):
    """Too few mutually unoccluded bits to produce a score"""


class DegenerateEmbedding(IrisError):
    """Embedding cannot be projected onto the unit hypersphere"""


class InvalidMarker(IrisError):
    """Reconstruction marker exceeds the mask image"""


# identification
class NoComparablePair(IrisError):
    """No homologous probe/gallery template pair exists"""


class EmptyGallery(IrisError):
    """Search was asked to run against an empty gallery"""


# evaluation
class InsufficientScores(IrisError):
    """Genuine or imposter score set is empty"""


class NoCommonPairs(IrisError):
    """Two score files share no pair key"""
