"""Exception types shared across the package.

The CLI maps these onto its exit-code taxonomy (2 = bad arguments,
3 = data errors, 4 = I/O and model-file errors).
"""


class FroccError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(FroccError):
    """Invalid configuration or argument values."""


class DataError(FroccError):
    """Problems with dataset contents: parse failures, dimension or label issues."""


class ModelFileError(FroccError):
    """Model file is malformed, has a bad checksum, or an unsupported version."""
