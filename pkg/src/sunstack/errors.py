"""Unified exception hierarchy for sunstack.

Every library exception derives from :class:`SunstackError` so callers can
catch simulator failures uniformly, or target a specific subclass.
"""

from __future__ import annotations


class SunstackError(Exception):
    """Base exception for all sunstack errors.

    Users can catch this class to handle any sunstack-specific error, or catch
    more specific subclasses for targeted error handling.
    """

    def __init__(self, message: str, cause: Exception | None = None):
        """Initialize SunstackError with optional cause chaining.

        Args:
            message: Human-readable error message.
            cause: Optional underlying exception that caused this error.
        """
        super().__init__(message)
        self.cause = cause

    def __str__(self) -> str:
        """Return the error message."""
        return super().__str__()


class ConfigError(SunstackError):
    """Configuration-related errors.

    Raised when a device file, spectrum file, simulation config or command
    flag cannot be read, parsed, interpolated, or validated.

    Typical error conditions include:

    * The file does not exist or cannot be read.
    * The file is not valid JSON/YAML.
    * Required fields are missing or out of range.
    * An environment variable placeholder cannot be resolved.
    """

    def __init__(
        self,
        message: str,
        field: str | None = None,
        cause: Exception | None = None,
    ):
        super().__init__(message, cause)
        self.field = field


class DeviceError(ConfigError):
    """Invalid device stack, layer or material definition."""

    def __init__(
        self,
        message: str,
        layer_index: int | None = None,
        field: str | None = None,
        cause: Exception | None = None,
    ):
        super().__init__(message, field=field, cause=cause)
        self.layer_index = layer_index


class SpectrumError(ConfigError):
    """Invalid or unreadable illumination spectrum."""


class AxisError(ConfigError):
    """Invalid sweep axis syntax or axis target."""


class MeshError(SunstackError):
    """Raised when a mesh cannot be generated within the node budget."""


class SolverError(SunstackError):
    """Numerical failure while solving the device equations."""

    def __init__(
        self,
        message: str,
        bias: float | None = None,
        cause: Exception | None = None,
    ):
        super().__init__(message, cause)
        self.bias = bias


class ConvergenceError(SolverError):
    """An iteration did not converge within its iteration budget."""

    def __init__(
        self,
        message: str,
        residual_history: list[float] | None = None,
        bias: float | None = None,
        cause: Exception | None = None,
    ):
        super().__init__(message, bias=bias, cause=cause)
        self.residual_history = residual_history or []


class NegativeDensityError(SolverError):
    """A continuity solve produced a non-positive carrier density."""

    def __init__(
        self,
        message: str,
        node: int | None = None,
        bias: float | None = None,
        cause: Exception | None = None,
    ):
        super().__init__(message, bias=bias, cause=cause)
        self.node = node


class AnalysisError(SunstackError):
    """Curve or metric extraction failure."""


class VocOutOfRangeError(AnalysisError):
    """The illuminated J-V curve never crossed zero before the sweep limit."""

    def __init__(self, message: str, v_max: float, cause: Exception | None = None):
        super().__init__(message, cause)
        self.v_max = v_max


class SweepError(SunstackError):
    """A parameter sweep produced no usable result."""


__all__ = [
    "SunstackError",
    "ConfigError",
    "DeviceError",
    "SpectrumError",
    "AxisError",
    "MeshError",
    "SolverError",
    "ConvergenceError",
    "NegativeDensityError",
    "AnalysisError",
    "VocOutOfRangeError",
    "SweepError",
]
