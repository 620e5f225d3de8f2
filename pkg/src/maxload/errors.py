"""Exception types shared across the package.

The CLI maps each of these onto its own exit code.
"""


class MaxloadError(Exception):
    pass


class ResourceCeilingError(MaxloadError):
    """A computation would exceed its configured state or range ceiling."""

    def __init__(self, message, estimate=None, ceiling=None):
        super().__init__(message)
        self.estimate = estimate
        self.ceiling = ceiling


class InsufficientTermsError(MaxloadError, ValueError):
    """Not enough sequence terms for the requested ansatz."""

    def __init__(self, message, required):
        super().__init__(message)
        self.required = required


class SingularLeadingCoefficientError(MaxloadError, ValueError):
    """The leading polynomial of a recurrence vanishes where it must be inverted."""

    def __init__(self, message, at):
        super().__init__(message)
        self.at = at


class PrecisionLossError(MaxloadError):
    """Two working precisions disagreed on too many digits."""


class FileFormatError(MaxloadError, ValueError):
    """An input JSON file does not follow the expected schema."""
