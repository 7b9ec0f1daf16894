"""Materials, layers, device stacks, presets, device files and meshing."""

from .io import dump_device, load_device, loads_device, save_device, stack_from_document, stack_to_document
from .materials import DEFAULT_TRAP, Material, TrapSpec, default_materials
from .mesh import Mesh, check_mesh_matches, generate_mesh, mesh_layers
from .presets import PRESET_NAMES, baseline_stack, preset
from .stack import (
    SWEEPABLE_PARAMETERS,
    ContactSpec,
    DeviceStack,
    Layer,
    LayerSpec,
    build_stack,
    make_layer,
)

__all__ = [
    "Material",
    "TrapSpec",
    "DEFAULT_TRAP",
    "default_materials",
    "Layer",
    "LayerSpec",
    "ContactSpec",
    "DeviceStack",
    "SWEEPABLE_PARAMETERS",
    "build_stack",
    "make_layer",
    "preset",
    "baseline_stack",
    "PRESET_NAMES",
    "Mesh",
    "generate_mesh",
    "mesh_layers",
    "check_mesh_matches",
    "load_device",
    "loads_device",
    "save_device",
    "dump_device",
    "stack_from_document",
    "stack_to_document",
]
