"""Exception types shared across the package."""


class TrapCoherenceError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(TrapCoherenceError):
    """Invalid or incomplete run configuration (CLI exit code 2)."""


class ConvergenceError(TrapCoherenceError):
    """A numeric routine failed to converge (CLI exit code 3)."""


class SpectrumDomainError(TrapCoherenceError):
    """A noise spectrum was queried outside its domain of validity."""

    def __init__(self, message, omega=None):
        super().__init__(message)
        self.omega = omega


class UnconvergedStateError(TrapCoherenceError):
    """A transition table or rate was requested for an unconverged state."""


class InsufficientStructureError(TrapCoherenceError):
    """Profile data lacks the double-peak structure needed for a fit."""


class ClosureWarning(UserWarning):
    """The closure sum rule is violated beyond tolerance (basis too small)."""


class ScanRangeWarning(UserWarning):
    """A potential scan extends beyond the trap bounds."""
