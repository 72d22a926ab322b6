"""Exception types for the segmentation model package."""


class DlsegError(Exception):
    """Base class for package errors."""


class ShapeError(DlsegError):
    """Input dimensions incompatible with the model or data layout."""


class FormatError(DlsegError):
    """A file does not match its expected on-disk grammar."""


class TrainingError(DlsegError):
    """Optimization diverged or reached an invalid state."""
