"""Exception types shared across the package."""


class EdgesyncError(Exception):
    """Base class for all package-specific errors."""


class ConfigurationError(EdgesyncError):
    """Invalid model/scenario parameters; message names the violated constraint."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class IntegrationFailure(EdgesyncError):
    """Time integration produced NaN/overflow."""

    def __init__(self, t: float, message: str = "non-finite values during integration"):
        self.t = t
        super().__init__(f"{message} at t={t:.6g}")


class CapabilityError(EdgesyncError):
    """Requested problem size exceeds what this implementation supports."""


class ClassificationError(EdgesyncError):
    """No synchronization modes found: parameters outside the sync regime."""


class NoOscillationError(EdgesyncError):
    """Time series has no dominant oscillation peak."""
