"""Eigenmodes and modal dynamics of a hinged-free plate modelling a suspension-bridge deck."""

__version__ = "0.1.0"

from .errors import (BlowUpError, ConfigError, DomainError, ModeDoesNotExistError,  # noqa: E402
                     OverdampedError, PlateModesError, ProfileCollapseError,
                     RootNotIsolatedError, StepSizeError)
from .spectrum import (Eigenmode, ModeKind, PlateGeometry, least_eigenvalues,  # noqa: E402
                       solve_mu, solve_nu)
from .modal import ModalState, ModalSystem, Trajectory, energy, integrate  # noqa: E402

__all__ = [
    "BlowUpError", "ConfigError", "DomainError", "ModeDoesNotExistError", "OverdampedError",
    "PlateModesError", "ProfileCollapseError", "RootNotIsolatedError", "StepSizeError",
    "Eigenmode", "ModeKind", "PlateGeometry", "least_eigenvalues", "solve_mu", "solve_nu",
    "ModalState", "ModalSystem", "Trajectory", "energy", "integrate",
]
