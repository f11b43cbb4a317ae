"""Exception hierarchy shared by all innerapx modules."""


class InnerApxError(Exception):
    """Base class for every error raised by this package."""


class InvalidHalfspaceError(InnerApxError, ValueError):
    pass


class EmptyInputError(InnerApxError, ValueError):
    pass


class DimensionError(InnerApxError, ValueError):
    pass


class BadConeError(InnerApxError, ValueError):
    """The halfspaces describe an empty polyhedron or one whose recession
    cone differs from the orientation cone."""


class InstanceParseError(InnerApxError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class FeasibilityError(InnerApxError, ValueError):
    pass


class TooLargeError(InnerApxError):
    pass


class OracleError(InnerApxError):
    """A weighted-sum solver failed to produce a solution."""


class OracleContractError(InnerApxError):
    """An oracle returned a solution whose image does not violate the
    queried halfspace."""


class LimitExceeded(InnerApxError):
    """Iteration or time limit hit; ``partial`` holds the run so far."""

    def __init__(self, message, partial):
        super().__init__(message)
        self.partial = partial


class MetricUndefinedError(InnerApxError, ValueError):
    pass


class UnsupportedDimensionError(InnerApxError, ValueError):
    pass
