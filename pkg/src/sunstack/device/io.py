"""Device file reading and writing (JSON, or YAML by suffix).

Layout::

    {
      "temperature_K": 300,
      "illumination_side": "front",
      "contacts": {"back": {...}, "front": {...}},
      "materials": {"my-absorber": {"bandgap": 1.2, ...}},
      "layers": [
        {"material": "p-CIGS", "thickness_um": 0.5,
         "doping_type": "acceptor", "doping_cm3": 1e10}
      ]
    }

Materials not in the built-in library, or deviating from it, are written
inline under ``materials``; inline definitions override built-ins of the
same name.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from sunstack.config.loading import (
    YAML_SUFFIXES,
    first_error_field,
    format_validation_error,
    interpolate_env,
    parse_document,
    read_document,
)
from sunstack.config.validators import log_debug
from sunstack.errors import ConfigError, DeviceError
from .materials import Material, TrapSpec, default_materials
from .stack import ContactSpec, DeviceStack, IlluminationSide, make_layer


class _MaterialEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    bandgap: float
    electron_affinity: float
    rel_permittivity: float
    Nc: float
    Nv: float
    vth_e: float
    vth_h: float
    mu_e: float
    mu_h: float
    radiative_coeff: float = 0.0
    trap: Optional[TrapSpec] = None


class _LayerEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    material: str
    thickness_um: float
    doping_type: str
    doping_cm3: float
    name: Optional[str] = None


class _Contacts(BaseModel):
    model_config = ConfigDict(extra="forbid")

    back: ContactSpec = Field(default_factory=ContactSpec)
    front: ContactSpec = Field(default_factory=ContactSpec)


class _DeviceDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    temperature_K: float = Field(default=300.0, gt=0)
    illumination_side: IlluminationSide = "front"
    contacts: _Contacts = Field(default_factory=_Contacts)
    materials: dict[str, _MaterialEntry] = Field(default_factory=dict)
    layers: list[_LayerEntry] = Field(min_length=2)


def stack_from_document(data: Any, source: str = "<device>") -> DeviceStack:
    """Validate a parsed device document and build the stack.

    Raises:
        ConfigError: Structural problems, with the offending field path.
        DeviceError: Invalid layer values, with the offending layer index.
    """
    try:
        doc = _DeviceDocument.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(
            format_validation_error(exc, source), field=first_error_field(exc), cause=exc
        ) from exc

    library = default_materials()
    for name, entry in doc.materials.items():
        try:
            library[name] = Material(name=name, **entry.model_dump())
        except ValidationError as exc:
            raise ConfigError(
                format_validation_error(exc, f"{source}: materials.{name}"),
                field=f"materials.{name}",
                cause=exc,
            ) from exc

    layers = []
    for index, entry in enumerate(doc.layers):
        try:
            layers.append(
                make_layer(
                    index,
                    entry.material,
                    entry.thickness_um,
                    entry.doping_type,
                    entry.doping_cm3,
                    name=entry.name,
                    materials=library,
                )
            )
        except DeviceError as exc:
            raise DeviceError(
                f"{source}: {exc}",
                layer_index=index,
                field=f"layers.{index}.{exc.field}" if exc.field else f"layers.{index}",
                cause=exc,
            ) from exc

    return DeviceStack(
        layers=tuple(layers),
        back_contact=doc.contacts.back,
        front_contact=doc.contacts.front,
        temperature=doc.temperature_K,
        illumination_side=doc.illumination_side,
    )


def stack_to_document(stack: DeviceStack) -> dict[str, Any]:
    """Serialize ``stack`` to the device-file mapping."""
    library = default_materials()
    inline: dict[str, dict[str, Any]] = {}
    for index, layer in enumerate(stack.layers):
        material = layer.material
        if library.get(material.name) == material:
            continue
        entry = material.model_dump(exclude={"name"})
        if material.name in inline and inline[material.name] != entry:
            raise DeviceError(
                f"Layer {index}: two different materials share the name '{material.name}'",
                layer_index=index,
            )
        inline[material.name] = entry

    layers = []
    for layer in stack.layers:
        entry = {
            "material": layer.material.name,
            "thickness_um": layer.thickness_um,
            "doping_type": layer.doping_type,
            "doping_cm3": layer.doping_cm3,
        }
        if layer.name is not None:
            entry["name"] = layer.name
        layers.append(entry)

    document: dict[str, Any] = {
        "temperature_K": stack.temperature,
        "illumination_side": stack.illumination_side,
        "contacts": {
            "back": stack.back_contact.model_dump(),
            "front": stack.front_contact.model_dump(),
        },
    }
    if inline:
        document["materials"] = inline
    document["layers"] = layers
    return document


def dump_device(stack: DeviceStack, suffix: str = ".json") -> str:
    """Render ``stack`` as JSON or YAML text."""
    document = stack_to_document(stack)
    if suffix.lower() in YAML_SUFFIXES:
        return yaml.safe_dump(document, sort_keys=False)
    return json.dumps(document, indent=2) + "\n"


def save_device(stack: DeviceStack, path: str | Path) -> Path:
    """Write ``stack`` to ``path``; the suffix selects JSON or YAML."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(dump_device(stack, target.suffix), encoding="utf-8")
    log_debug("Wrote device file", path=str(target), layers=len(stack.layers))
    return target


def load_device(path: str | Path) -> DeviceStack:
    """Read and validate a device file."""
    data = read_document(path)
    stack = stack_from_document(data, source=str(path))
    log_debug("Loaded device", path=str(path), layers=stack.labels)
    return stack


def loads_device(text: str, suffix: str = ".json") -> DeviceStack:
    """Parse device text (no ``.env`` lookup, env placeholders still resolved)."""
    data = interpolate_env(parse_document(text, suffix))
    return stack_from_document(data)


__all__ = [
    "stack_from_document",
    "stack_to_document",
    "dump_device",
    "save_device",
    "load_device",
    "loads_device",
]
