"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """An argument violates a documented precondition."""


class InsufficientSampleError(InvalidInputError):
    """The sample is too small for the requested operation."""


class DegenerateResponseError(ValueError):
    """The response carries no usable variation (e.g. all values equal).

    Raised when the tie correction n0 equals n, in which case no coefficient
    value is defined.
    """


class NumericalError(RuntimeError):
    """A numerical routine failed to reach its accuracy target."""


class DataError(ValueError):
    """A dataset could not be ingested under the active policy."""
