"""Exception hierarchy shared by all plate_modes modules."""


class PlateModesError(Exception):
    """Base class for every error raised by this package."""


class DomainError(PlateModesError, ValueError):
    """An argument lies outside the domain where the formula applies."""


class RootNotIsolatedError(PlateModesError):
    """No sign change of a characteristic function was found in its bracket."""


class ModeDoesNotExistError(PlateModesError):
    """The requested eigenvalue family is empty for this wavenumber."""


class ProfileCollapseError(PlateModesError):
    """An eigenfunction profile vanished identically and cannot be normalized."""


class StepSizeError(PlateModesError, ValueError):
    """The time step does not resolve the stiffest retained mode."""


class BlowUpError(PlateModesError):
    """The modal state became non-finite during integration.

    The partial trajectory up to the last finite state is kept on
    ``self.trajectory``.
    """

    def __init__(self, message, t, trajectory=None):
        super().__init__(message)
        self.t = t
        self.trajectory = trajectory


class OverdampedError(PlateModesError):
    """The closed-form underdamped response does not apply."""


class ConfigError(PlateModesError, ValueError):
    """A run configuration is malformed or violates a precondition."""
