"""Exception types raised by tracklink.

Input problems derive from ``ValueError`` so callers that already guard
against bad values keep working; numerical failures derive from
``ArithmeticError``. The CLI maps the two families to different exit codes.
"""


class InputError(ValueError):
    """Invalid input data or parameters."""


class DimensionMismatch(InputError):
    """A vector or matrix does not have the expected dimension."""


class EmptyGraph(InputError):
    """A camera graph has no tracklets."""


class TooFewSamples(InputError):
    """Not enough samples to fit a model."""


class EmptyNeighborhood(InputError):
    """A neighbor set is empty (the camera has a single tracklet)."""


class InvalidAssignment(InputError):
    """An assignment reuses a real column or does not fit the cost matrix."""


class InstanceTooLarge(InputError):
    """An instance exceeds the size limit of the exhaustive oracle."""


class ConfigInvalid(InputError):
    """A configuration object is internally inconsistent."""


class FormatError(InputError):
    """A file does not follow the expected binary or text format."""


class BadMagic(FormatError):
    """The file does not start with the expected magic bytes."""


class VersionUnsupported(FormatError):
    """The file declares a format version this reader does not know."""


class TruncatedFile(FormatError):
    """The file ends before all declared records were read."""


class NumericalError(ArithmeticError):
    """A numerical routine failed on its input."""


class RankDeficient(NumericalError):
    """The data has fewer non-zero singular values than requested."""


class EigenFailure(NumericalError):
    """An eigendecomposition could not be computed."""


class DegenerateLabelsError(ValueError):
    """Label re-weighting produced an empty training class."""


class NoPositives(DegenerateLabelsError):
    """Every matched pair was filtered; no positive training pair remains."""


class NoNegatives(DegenerateLabelsError):
    """No hard negative pair remains after filtering."""
