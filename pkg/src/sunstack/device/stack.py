"""Layers, contacts and the device stack."""

from __future__ import annotations

from typing import Literal, Mapping, Optional, Sequence, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from sunstack.errors import DeviceError
from .materials import Material, default_materials

DopingType = Literal["donor", "acceptor"]
IlluminationSide = Literal["front", "back"]
LayerParameter = Literal["thickness_um", "doping_cm3"]

SWEEPABLE_PARAMETERS: tuple[str, ...] = ("thickness_um", "doping_cm3")

#: (material name, thickness µm, doping type, doping cm⁻³[, layer name])
LayerSpec = Union[
    tuple[str, float, str, float],
    tuple[str, float, str, float, Optional[str]],
]


class Layer(BaseModel):
    """One homogeneous layer of the stack."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    material: Material
    thickness_um: float = Field(gt=0)
    doping_type: DopingType
    doping_cm3: float = Field(ge=0)
    name: Optional[str] = None

    @property
    def label(self) -> str:
        """Layer name used by sweep axes (explicit name or material label)."""
        return self.name or self.material.label

    @property
    def thickness_cm(self) -> float:
        return self.thickness_um * 1e-4

    @property
    def net_doping(self) -> float:
        """N_D − N_A in cm⁻³."""
        return self.doping_cm3 if self.doping_type == "donor" else -self.doping_cm3


class ContactSpec(BaseModel):
    """Ohmic contact with an optional metal Fermi-level alignment.

    With ``majority_barrier_ev`` unset the contact node is pinned to the
    adjacent layer's charge-neutral equilibrium (flat band). When set, the
    metal Fermi level sits that far from the majority band edge of the
    adjacent layer (Schottky-Mott); ``0.0`` is an accumulation contact with
    the Fermi level at the band edge, as for a transparent conducting oxide.

    The surface recombination velocities are carried with the device so that
    files round-trip, but an ideal ohmic contact does not use them.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["ohmic"] = "ohmic"
    majority_barrier_ev: Optional[float] = Field(default=None, ge=0)
    surface_recomb_e: float = Field(default=1e7, ge=0)
    surface_recomb_p: float = Field(default=1e7, ge=0)


class DeviceStack(BaseModel):
    """Ordered layers, index 0 at the back contact, last at the front."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    layers: tuple[Layer, ...]
    back_contact: ContactSpec = Field(default_factory=ContactSpec)
    front_contact: ContactSpec = Field(default_factory=ContactSpec)
    temperature: float = Field(default=300.0, gt=0)
    illumination_side: IlluminationSide = "front"

    @model_validator(mode="after")
    def _check_layers(self) -> "DeviceStack":
        if len(self.layers) < 2:
            raise ValueError("a device stack needs at least 2 layers")
        return self

    @property
    def total_thickness_um(self) -> float:
        return sum(layer.thickness_um for layer in self.layers)

    @property
    def labels(self) -> list[str]:
        return [layer.label for layer in self.layers]

    def layer_index(self, layer: Union[str, int]) -> int:
        """Resolve a layer label (or index) to its position in the stack.

        Raises:
            DeviceError: If no layer, or more than one layer, matches.
        """
        if isinstance(layer, int):
            if not 0 <= layer < len(self.layers):
                raise DeviceError(f"Layer index {layer} out of range", layer_index=layer)
            return layer
        matches = [i for i, label in enumerate(self.labels) if label == layer]
        if not matches:
            matches = [
                i for i, label in enumerate(self.labels) if label.lower() == layer.lower()
            ]
        if not matches:
            raise DeviceError(
                f"Unknown layer '{layer}' (available: {', '.join(self.labels)})"
            )
        if len(matches) > 1:
            raise DeviceError(
                f"Layer label '{layer}' is ambiguous; give the layers distinct names"
            )
        return matches[0]

    def with_parameter(
        self, layer: Union[str, int], parameter: str, value: float
    ) -> "DeviceStack":
        """Return a copy with ``parameter`` of ``layer`` set to ``value``."""
        index = self.layer_index(layer)
        if parameter not in SWEEPABLE_PARAMETERS:
            raise DeviceError(
                f"Unknown layer parameter '{parameter}' "
                f"(expected one of {', '.join(SWEEPABLE_PARAMETERS)})",
                layer_index=index,
                field=parameter,
            )
        try:
            updated = Layer.model_validate(
                {**self.layers[index].model_dump(), parameter: value}
            )
        except ValidationError as exc:
            raise DeviceError(
                f"Invalid {parameter}={value!r} for layer {index}",
                layer_index=index,
                field=parameter,
                cause=exc,
            ) from exc
        layers = list(self.layers)
        layers[index] = updated
        return self.model_copy(update={"layers": tuple(layers)})

    def with_layer(self, layer: Layer, position: Literal["back", "front"] = "back") -> "DeviceStack":
        """Return a copy with ``layer`` added at the back or front contact."""
        layers = (layer, *self.layers) if position == "back" else (*self.layers, layer)
        return self.model_copy(update={"layers": layers})

    def with_temperature(self, temperature: float) -> "DeviceStack":
        if temperature <= 0:
            raise DeviceError(f"Temperature must be positive, got {temperature}")
        return self.model_copy(update={"temperature": float(temperature)})


def _layer_error(index: int, field: str, problem: str) -> DeviceError:
    return DeviceError(
        f"Layer {index} (layers.{index}.{field}): {problem}", layer_index=index, field=field
    )


def make_layer(
    index: int,
    material: str,
    thickness_um: float,
    doping_type: str,
    doping_cm3: float,
    name: Optional[str] = None,
    materials: Optional[Mapping[str, Material]] = None,
) -> Layer:
    """Build one :class:`Layer`, reporting problems against ``index``."""
    library = materials if materials is not None else default_materials()
    if material not in library:
        raise _layer_error(
            index,
            "material",
            f"unknown material '{material}' (known: {', '.join(sorted(library))})",
        )
    if not thickness_um > 0:
        raise _layer_error(index, "thickness_um", f"must be positive, got {thickness_um} µm")
    if doping_type not in ("donor", "acceptor"):
        raise _layer_error(
            index, "doping_type", f"must be 'donor' or 'acceptor', got '{doping_type}'"
        )
    if not doping_cm3 >= 0:
        raise _layer_error(index, "doping_cm3", f"must be >= 0, got {doping_cm3}")
    return Layer(
        material=library[material],
        thickness_um=float(thickness_um),
        doping_type=doping_type,  # type: ignore[arg-type]
        doping_cm3=float(doping_cm3),
        name=name,
    )


def build_stack(
    spec: Sequence[LayerSpec],
    temperature: float = 300.0,
    *,
    materials: Optional[Mapping[str, Material]] = None,
    back_contact: Optional[ContactSpec] = None,
    front_contact: Optional[ContactSpec] = None,
    illumination_side: IlluminationSide = "front",
) -> DeviceStack:
    """Assemble a :class:`DeviceStack` from back-to-front layer tuples.

    Args:
        spec: ``(material, thickness_um, doping_type, doping_cm3[, name])`` per
            layer, back contact first.
        temperature: Lattice temperature in K.
        materials: Material library; defaults to :func:`default_materials`.

    Raises:
        DeviceError: Unknown material or invalid layer values, naming the
            offending layer index.
    """
    library = dict(materials) if materials is not None else default_materials()
    layers = []
    for index, entry in enumerate(spec):
        if len(entry) not in (4, 5):
            raise DeviceError(
                f"Layer {index}: expected (material, thickness_um, doping_type, doping_cm3[, name])",
                layer_index=index,
            )
        name = entry[4] if len(entry) == 5 else None  # type: ignore[misc]
        layers.append(make_layer(index, *entry[:4], name=name, materials=library))

    if len(layers) < 2:
        raise DeviceError(f"A device stack needs at least 2 layers, got {len(layers)}")
    if temperature <= 0:
        raise DeviceError(f"Temperature must be positive, got {temperature}")

    return DeviceStack(
        layers=tuple(layers),
        back_contact=back_contact or ContactSpec(),
        front_contact=front_contact or ContactSpec(),
        temperature=float(temperature),
        illumination_side=illumination_side,
    )


__all__ = [
    "DopingType",
    "IlluminationSide",
    "LayerParameter",
    "LayerSpec",
    "SWEEPABLE_PARAMETERS",
    "Layer",
    "ContactSpec",
    "DeviceStack",
    "make_layer",
    "build_stack",
]
