"""
Exception hierarchy for the point-interaction simulator.
"""


class PointWaveError(Exception):
    """Base class for every error raised by pointwave."""


class InvalidParameterError(PointWaveError, ValueError):
    """Raised when a scalar parameter (alpha, lambda, k, ...) is out of range."""


class ShapeError(PointWaveError, ValueError):
    """Raised when fields live on different grids or have the wrong sample count."""


class DomainError(PointWaveError):
    """Raised when an operator is applied outside of its domain.

    Covers states violating the boundary condition at the origin and
    spectral functions that are not finite on the needed part of the
    spectrum.
    """


class SingularResolventError(PointWaveError):
    """Raised when a resolvent is requested too close to a pole."""


class InvalidStateError(PointWaveError):
    """Raised when a phase-space state lacks a property an operation needs,
    e.g. a Coulomb charge fed to the free flow or a runaway component fed
    to a non-runaway map."""


class ConfigError(PointWaveError):
    """Raised when a run configuration cannot be parsed or validated.

    The ``field`` attribute holds the dotted path of the offending entry.
    """

    def __init__(self, message: str, field: str = ""):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


class LightConeError(PointWaveError):
    """Raised when a time horizon does not fit inside the truncated domain.

    ``required_r_max`` carries the smallest domain radius that would fit.
    """

    def __init__(self, message: str, required_r_max: float):
        super().__init__(message)
        self.required_r_max = required_r_max
