"""Settings models, document loading and logging helpers."""

from __future__ import annotations

from pathlib import Path

from pydantic import ValidationError

from sunstack.errors import ConfigError
from .loading import (
    format_validation_error,
    first_error_field,
    interpolate_env,
    parse_document,
    read_document,
)
from .models import (
    JVConfig,
    MeshConfig,
    Metric,
    OpticsConfig,
    QEConfig,
    SimulationConfig,
    SolverConfig,
    SweepConfig,
)
from .validators import log_debug, log_error, log_info, log_warning


def load_simulation_config(path: str | Path) -> SimulationConfig:
    """Load and validate a :class:`SimulationConfig` from a YAML/JSON file.

    Raises:
        ConfigError: If the file cannot be read or fails validation.
    """
    data = read_document(path)
    try:
        cfg = SimulationConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(
            format_validation_error(exc, str(path)),
            field=first_error_field(exc),
            cause=exc,
        ) from exc
    log_info("Loaded simulation config", path=str(path))
    return cfg


__all__ = [
    "SimulationConfig",
    "MeshConfig",
    "SolverConfig",
    "OpticsConfig",
    "JVConfig",
    "QEConfig",
    "SweepConfig",
    "Metric",
    "load_simulation_config",
    "read_document",
    "parse_document",
    "interpolate_env",
    "format_validation_error",
    "first_error_field",
    "log_debug",
    "log_info",
    "log_warning",
    "log_error",
]
