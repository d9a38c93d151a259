"""Exception types and the CLI exit-code contract."""

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BLOWUP = 3
EXIT_INVARIANT = 4


class QCBridgeError(Exception):
    """Base class for all package errors."""

    exit_code = EXIT_CONFIG


class ConfigurationError(QCBridgeError):
    """Invalid grid, state, or evolution configuration."""


class SchemaError(ConfigurationError):
    """Malformed experiment spec; message names the offending key."""


class ShapeError(ConfigurationError):
    """Operands live on incompatible grids or time stamps."""


class DomainError(QCBridgeError):
    """Physical parameter outside its valid domain."""


class DegenerateStateError(QCBridgeError):
    """State with no usable amplitude (all-zero or cancelled superposition)."""


class DegenerateWeightsError(QCBridgeError):
    """Effective-coupling weights sum to zero."""


class ResourceError(QCBridgeError):
    """Requested problem size exceeds the desk-scale caps."""


class NumericalBlowupError(QCBridgeError):
    """NaN/Inf appeared during propagation."""

    exit_code = EXIT_BLOWUP

    def __init__(self, message: str, step_index: int | None = None, t: float | None = None):
        super().__init__(message)
        self.step_index = step_index
        self.t = t


class InvariantViolation(QCBridgeError):
    """A run-level invariant (norm drift, leakage, residual) failed."""

    exit_code = EXIT_INVARIANT


class StabilityWarning(UserWarning):
    """Step size exceeds the resolution scale of the scheme."""


class CausticWarning(UserWarning):
    """Node-floor coverage grew past the caustic threshold."""
