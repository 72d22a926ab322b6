"""Exception types shared across the toolkit."""


class JetsegError(Exception):
    """Base class for all toolkit errors."""


class FormatError(JetsegError):
    """A file does not match its expected on-disk grammar."""


class LabelError(JetsegError):
    """A mask contains a pixel value outside the label alphabet {0,1,2,3}."""


class RangeError(JetsegError):
    """A numeric parameter range is empty or inverted."""


class BoundsError(JetsegError):
    """A window or shape does not fit inside the frame."""


class DegenerateError(JetsegError):
    """The input has no variation to work with (constant data, all-zero diffs)."""


class MathError(JetsegError):
    """A formula was evaluated outside its mathematical domain."""


class ConfigError(JetsegError):
    """Invalid or contradictory configuration values."""


class NoFlameError(JetsegError):
    """An operation that needs flame pixels received an empty flame mask."""


class EmptySetError(JetsegError):
    """A set-distance was requested for an empty point set."""


class ShapeError(JetsegError):
    """Two arrays that must share dimensions do not."""


class DivisionError(JetsegError):
    """A percentage-error denominator is zero."""


class EmptyDatasetError(JetsegError):
    """A dataset operation received no ids."""
