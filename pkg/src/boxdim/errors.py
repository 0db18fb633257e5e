"""Exception types shared across the package.

The CLI maps these onto distinct exit codes, so library code should raise
the most specific type that applies rather than bare ValueError/RuntimeError.
"""


class BoxdimError(Exception):
    """Base class for all package-specific errors."""


class ShapeMismatchError(BoxdimError, ValueError):
    """An element (or generator) does not conform to the group it was used with."""


class ConfigError(BoxdimError, ValueError):
    """Invalid run configuration: bad moduli, unknown task, malformed values."""


class ResourceCapError(BoxdimError, RuntimeError):
    """A vertex/state/memory cap was exceeded before the computation finished."""


class VerificationError(BoxdimError, RuntimeError):
    """A certified bound or verified-construction check failed.

    Raised when a property the construction is supposed to guarantee does not
    hold on the computed data; this always indicates a bug or tampered input,
    never a legitimate run outcome.
    """


class GrowthBoundError(BoxdimError, ValueError):
    """A claimed polynomial growth bound does not hold at some radius."""


class InsufficientInputError(BoxdimError, RuntimeError):
    """The diagonal-transfer machinery ran out of usable input radii."""
