"""Exception types shared across the package.

The CLI maps these onto exit codes (see cli.py): configuration problems,
numerical accuracy failures and Monte Carlo horizon failures are distinct.
"""


class OmegakillError(Exception):
    """Base class for package errors."""


class ConfigError(OmegakillError):
    """Invalid configuration, grid setup, or input schema."""


class DomainError(OmegakillError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class GridRangeError(OmegakillError):
    """Query outside a tabulated grid; rebuild with a larger range."""


class ConditioningError(OmegakillError):
    """Inputs too close to a singular configuration."""


class StepSizeError(OmegakillError):
    """Grid step too large for a stable Volterra march."""


class UnsupportedCaseError(OmegakillError):
    """Input falls outside the cases a solver supports."""


class AccuracyError(OmegakillError):
    """A requested tolerance cannot be met or certified."""


class CostGuardError(OmegakillError):
    """Request exceeds a built-in cost guard."""


class HorizonError(OmegakillError):
    """Monte Carlo horizon bias exceeds the requested budget."""
