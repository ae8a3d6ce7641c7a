"""Exception types raised across the package."""


class LdeError(Exception):
    """Base class for all errors raised by :mod:`lde`."""


class InvalidSpec(LdeError, ValueError):
    pass


class EmptySector(LdeError, ValueError):
    pass


class SectorViolation(LdeError, ValueError):
    pass


class BasisMismatch(LdeError, ValueError):
    pass


class TooLargeForDense(LdeError):
    pass


class NumericalError(LdeError):
    """Failure of a numerical procedure (as opposed to bad input)."""


class NoConvergence(NumericalError):
    pass


class DegenerateGroundState(NumericalError):
    pass


class ProjectionError(LdeError, ValueError):
    pass


class InvalidSeparation(LdeError, ValueError):
    pass


class InvalidState(LdeError, ValueError):
    pass


class NeverEntangled(NumericalError):
    pass


class InvalidGap(LdeError, ValueError):
    pass


class ConfigError(LdeError, ValueError):
    pass
