"""Reading JSON/YAML documents with ``.env`` support and env interpolation.

Device files, simulation configs and study definitions all go through
:func:`read_document`: the format is picked from the file suffix, ``.env``
files next to the document are merged into the process environment, and
``${env:VAR}`` / ``${env:VAR:default}`` placeholders are substituted before
validation.
"""

from __future__ import annotations

import json
import os
import re
from pathlib import Path
from typing import Any

import yaml
from dotenv import dotenv_values
from pydantic import ValidationError

from sunstack.errors import ConfigError
from .validators import log_debug

# Supports ${env:VAR} and ${env:VAR:default}
ENV_PATTERN = re.compile(r"\$\{env:([A-Za-z_][A-Za-z0-9_]*)(?::([^}]*))?\}")

YAML_SUFFIXES = {".yaml", ".yml"}
JSON_SUFFIXES = {".json"}


def interpolate_env(value: Any) -> Any:
    """Recursively replace ``${env:VAR[:default]}`` placeholders.

    Strings that consist of exactly one placeholder are re-parsed as YAML
    scalars so that ``thickness_um: ${env:CIGS_UM}`` yields a float.

    Raises:
        ConfigError: If a variable is unset and has no default.
    """
    if isinstance(value, str):
        match = ENV_PATTERN.fullmatch(value.strip())
        if match:
            return _coerce_scalar(_replace_env_match(match))
        return ENV_PATTERN.sub(_replace_env_match, value)
    if isinstance(value, list):
        return [interpolate_env(item) for item in value]
    if isinstance(value, dict):
        return {key: interpolate_env(val) for key, val in value.items()}
    return value


def _replace_env_match(match: re.Match) -> str:
    var_name = match.group(1)
    default = match.group(2)
    if var_name in os.environ:
        return os.environ[var_name]
    if default is not None:
        return default
    raise ConfigError(f"Environment variable '{var_name}' is not set", field=var_name)


def _coerce_scalar(text: str) -> Any:
    try:
        parsed = yaml.safe_load(text)
    except yaml.YAMLError:
        return text
    return parsed if isinstance(parsed, (int, float, bool)) else text


def load_dotenv_for(path: Path) -> dict[str, str]:
    """Merge ``.env`` from the document's directory into ``os.environ``.

    Variables already present in the environment win over the file.
    """
    dotenv_path = path.parent / ".env"
    if not dotenv_path.is_file():
        return {}
    try:
        values = {k: v for k, v in dotenv_values(dotenv_path).items() if v is not None}
    except OSError as exc:
        raise ConfigError(f"Failed to read .env file '{dotenv_path}': {exc}") from exc
    for key, value in values.items():
        os.environ.setdefault(key, value)
    log_debug("Loaded .env file", path=str(dotenv_path), var_count=len(values))
    return values


def parse_document(text: str, suffix: str, source: str = "<string>") -> Any:
    """Parse ``text`` as JSON or YAML depending on ``suffix``.

    Parse failures are reported with the line (and column for JSON) of the
    offending token.
    """
    suffix = suffix.lower()
    if suffix in JSON_SUFFIXES:
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(
                f"{source}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
            ) from exc
    if suffix in YAML_SUFFIXES:
        try:
            return yaml.safe_load(text)
        except yaml.YAMLError as exc:
            mark = getattr(exc, "problem_mark", None)
            where = f" at line {mark.line + 1}" if mark is not None else ""
            raise ConfigError(f"{source}: invalid YAML{where}: {exc}") from exc
    raise ConfigError(
        f"{source}: unsupported file type '{suffix or '<none>'}' (use .json, .yaml or .yml)"
    )


def read_document(path: str | Path, *, load_dotenv: bool = True) -> dict[str, Any]:
    """Read a JSON/YAML mapping from ``path`` with env interpolation applied."""
    file_path = Path(path)
    if not file_path.is_file():
        raise ConfigError(f"File not found: {file_path}")
    try:
        text = file_path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"Failed to read '{file_path}': {exc}") from exc

    if load_dotenv:
        load_dotenv_for(file_path)

    data = parse_document(text, file_path.suffix, source=str(file_path))
    if data is None:
        raise ConfigError(f"{file_path}: document is empty")
    if not isinstance(data, dict):
        raise ConfigError(f"{file_path}: top level must be a mapping")
    log_debug("Read document", path=str(file_path), keys=sorted(data))
    return interpolate_env(data)


def format_validation_error(exc: ValidationError, source: str) -> str:
    """Render a pydantic error as ``source: field.path: message`` lines."""
    lines = []
    for error in exc.errors():
        loc = ".".join(str(part) for part in error["loc"]) or "<root>"
        lines.append(f"{source}: {loc}: {error['msg']}")
    return "\n".join(lines)


def first_error_field(exc: ValidationError) -> str | None:
    errors = exc.errors()
    if not errors:
        return None
    return ".".join(str(part) for part in errors[0]["loc"]) or None


__all__ = [
    "ENV_PATTERN",
    "interpolate_env",
    "load_dotenv_for",
    "parse_document",
    "read_document",
    "format_validation_error",
    "first_error_field",
]
