"""Exception types raised by the package.

The CLI maps these onto distinct exit codes, so library code should raise
the most specific class that applies.
"""


class SwarrayError(Exception):
    """Base class for all package-specific errors."""


class DomainError(SwarrayError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class GridDensityError(SwarrayError, ValueError):
    """A sphere grid is too coarse for the requested truncation order."""


class FieldFileError(SwarrayError, ValueError):
    """A field-sample file is malformed or inconsistent."""


class DelayAmbiguityError(SwarrayError, ValueError):
    """A propagation delay exceeds the unambiguous range 2*pi/delta_omega."""


class SingularFimError(SwarrayError, RuntimeError):
    """A Fisher information matrix is numerically singular.

    Carries the eigenvalue extremes of the offending matrix so callers can
    report conditioning.
    """

    def __init__(self, message: str, eig_min: float, eig_max: float):
        super().__init__(f"{message} (eigenvalue range [{eig_min:.3e}, {eig_max:.3e}])")
        self.eig_min = eig_min
        self.eig_max = eig_max


class ConfigError(SwarrayError, ValueError):
    """A run-configuration file failed validation."""
