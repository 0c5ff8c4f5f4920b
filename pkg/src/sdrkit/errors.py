"""Exception hierarchy.

Every error raised by this package derives from :class:`SdrkitError`.  The
three intermediate classes map onto the CLI exit codes: configuration
problems exit with 2, data problems with 3 and numerical failures with 4.
"""


class SdrkitError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigError(SdrkitError):
    """A request that can never succeed (bad method spec, bad dimensions)."""

    exit_code = 2


class DataError(SdrkitError):
    """Input data that cannot be processed (too small, missing, malformed)."""

    exit_code = 3


class NumericalError(SdrkitError):
    """A numerical operation that failed on otherwise valid input."""

    exit_code = 4


class InvalidMatrix(NumericalError):
    """Matrix input contains non-finite entries or has the wrong shape."""


class InvalidVector(DataError):
    """Vector input contains non-finite entries."""


class SingularCovariance(NumericalError):
    """Covariance (plus ridge) is not positive definite."""


class RankDeficient(NumericalError):
    """A basis matrix does not have full column rank."""


class DimensionMismatch(ConfigError):
    """Requested dimensions are inconsistent with the data."""


class TooFewSamples(DataError):
    """Not enough observations for the requested operation."""


class MissingKernelSpec(ConfigError):
    """A kernel-weighted method was requested without a kernel."""


class UnivariateOnly(ConfigError):
    """A slicing method was requested for a multivariate response."""


class TooManySlices(ConfigError):
    """More slices than observations."""


class SliceTooSmall(DataError):
    """A slice ended up with fewer than two observations."""


class InvalidSpec(ConfigError):
    """A simulation or run specification violates its constraints."""


class MissingColumn(DataError):
    """A requested column is absent from the CSV header."""


class NonNumericCell(DataError):
    """A selected cell could not be parsed as a number (strict mode)."""


class NegativeUnderSqrt(DataError):
    """A square-root transform was requested for a negative value."""
