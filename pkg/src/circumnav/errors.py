"""Exception hierarchy shared by every module of the package."""


class CircumnavError(Exception):
    """Base class for all errors raised by circumnav."""


class DegenerateVectorError(CircumnavError, ValueError):
    pass


class BearingSingularityError(CircumnavError):
    """Agent sits (numerically) on top of the estimated centre."""

    def __init__(self, message, agent=None):
        super().__init__(message)
        self.agent = agent


class InvalidTargetError(CircumnavError, ValueError):
    pass


class OutOfRangeError(CircumnavError, ValueError):
    pass


class FormatError(CircumnavError, ValueError):
    """Malformed waypoint table; ``row`` is 1-based."""

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class InsufficientDataError(CircumnavError):
    pass


class DegenerateGeometryError(CircumnavError):
    pass


class NonconvergenceError(CircumnavError):
    """Solver hit its iteration cap; ``best`` holds the best iterate found."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class InconsistentIntervalError(CircumnavError, ValueError):
    pass


class AllFaultyError(CircumnavError):
    pass


class InvalidNoiseError(CircumnavError, ValueError):
    pass


class TopologyError(CircumnavError, ValueError):
    pass


class InvalidInitialConditionError(CircumnavError, ValueError):
    pass


class ConfigError(CircumnavError, ValueError):
    """Config text could not be parsed or violates an invariant."""

    def __init__(self, message, line=None, key=None):
        super().__init__(message)
        self.line = line
        self.key = key


class SimulationError(CircumnavError):
    """An engine error, tagged with the step index at which it happened."""

    def __init__(self, message, step=None, cause=None):
        super().__init__(message)
        self.step = step
        self.cause = cause
