"""Exception types shared across the package.

ConfigError maps to CLI exit code 2, NumericalError to exit code 3.
"""


class ConfigError(ValueError):
    """Invalid or malformed run configuration."""


class NumericalError(RuntimeError):
    """A numerical procedure failed (degenerate data, divergence, ...)."""


class DegenerateSignalError(NumericalError):
    """First-frame magnitude too small to normalize against."""


class TrainingDivergedError(NumericalError):
    """Network training produced a non-finite loss."""
