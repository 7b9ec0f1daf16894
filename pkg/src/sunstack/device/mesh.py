"""One-dimensional finite-volume mesh.

Interface nodes are shared by two layers and are assigned to the layer on
their left (lower index). Edge ``i`` joins nodes ``i`` and ``i + 1`` and takes
the material of node ``i + 1``'s layer unless that node is an interface, in
which case both are in the same layer anyway.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from sunstack.config.models import MeshConfig
from sunstack.errors import MeshError
from .stack import DeviceStack

UM_TO_CM = 1e-4


@dataclass(frozen=True, eq=False)
class Mesh:
    """Node positions (cm) with per-node layer membership."""

    nodes: np.ndarray
    layer_of_node: np.ndarray
    interface_nodes: tuple[int, ...]
    policy: str = "graded"
    min_spacing_cm: float = 0.0
    grading_ratio: float = 1.0

    @property
    def n_nodes(self) -> int:
        return int(self.nodes.size)

    @property
    def n_layers(self) -> int:
        return len(self.interface_nodes) - 1

    @property
    def spacing(self) -> np.ndarray:
        """Edge lengths h (cm), one per edge."""
        return np.diff(self.nodes)

    @property
    def control_volumes(self) -> np.ndarray:
        """Box widths around each node (cm); half-edges at the contacts."""
        h = self.spacing
        dx = np.empty(self.n_nodes)
        dx[0] = h[0] / 2
        dx[-1] = h[-1] / 2
        dx[1:-1] = (h[:-1] + h[1:]) / 2
        return dx

    @property
    def layer_of_edge(self) -> np.ndarray:
        """Layer index of each edge."""
        return self.layer_of_node[1:]

    def positions_um(self) -> np.ndarray:
        return self.nodes / UM_TO_CM


def _graded_points(length: float, cfg: MeshConfig) -> np.ndarray:
    h_min = cfg.min_spacing_um * UM_TO_CM
    h_max = cfg.max_spacing_um * UM_TO_CM
    min_intervals = cfg.min_interior_nodes + 1
    half = length / 2

    steps: list[float] = []
    total = 0.0
    h = h_min
    while total < half:
        steps.append(h)
        total += h
        h = min(h * cfg.grading_ratio, h_max)
        if 2 * len(steps) > cfg.node_budget:
            raise MeshError(
                f"Layer of {length / UM_TO_CM:g} µm needs more than {cfg.node_budget} nodes"
            )

    if 2 * len(steps) < min_intervals:
        return np.linspace(0.0, length, min_intervals + 1)

    half_steps = np.asarray(steps) * (half / total)
    points = np.concatenate(([0.0], np.cumsum(np.concatenate((half_steps, half_steps[::-1])))))
    points[-1] = length
    return points


def _uniform_points(length: float, cfg: MeshConfig) -> np.ndarray:
    count = max(cfg.nodes_per_layer, cfg.min_interior_nodes + 2)
    return np.linspace(0.0, length, count)


def mesh_layers(thicknesses_um: Sequence[float], cfg: Optional[MeshConfig] = None) -> Mesh:
    """Mesh consecutive layers of the given thicknesses (µm).

    Raises:
        MeshError: On non-positive thickness or when the node budget is exceeded.
    """
    cfg = cfg or MeshConfig()
    if not thicknesses_um:
        raise MeshError("Cannot mesh an empty layer list")

    pieces: list[np.ndarray] = []
    owners: list[np.ndarray] = []
    interfaces = [0]
    offset = 0.0
    for index, thickness in enumerate(thicknesses_um):
        if not thickness > 0:
            raise MeshError(f"Layer {index} has non-positive thickness {thickness}")
        length = thickness * UM_TO_CM
        if cfg.policy == "uniform":
            local = _uniform_points(length, cfg)
        else:
            local = _graded_points(length, cfg)
        start = 0 if index == 0 else 1
        pieces.append(offset + local[start:])
        owners.append(np.full(local.size - start, index, dtype=int))
        offset += length
        interfaces.append(interfaces[-1] + local.size - 1)

    nodes = np.concatenate(pieces)
    layer_of_node = np.concatenate(owners)
    nodes[-1] = offset

    if nodes.size > cfg.node_budget:
        raise MeshError(
            f"Mesh needs {nodes.size} nodes, above the budget of {cfg.node_budget}; "
            "raise min_spacing_um or max_spacing_um"
        )
    if np.any(np.diff(nodes) <= 0):
        raise MeshError("Mesh positions are not strictly increasing")

    return Mesh(
        nodes=nodes,
        layer_of_node=layer_of_node,
        interface_nodes=tuple(interfaces),
        policy=cfg.policy,
        min_spacing_cm=float(np.diff(nodes).min()),
        grading_ratio=cfg.grading_ratio if cfg.policy == "graded" else 1.0,
    )


def generate_mesh(stack: DeviceStack, cfg: Optional[MeshConfig] = None) -> Mesh:
    """Mesh ``stack``, refining geometrically towards interfaces and contacts."""
    return mesh_layers([layer.thickness_um for layer in stack.layers], cfg)


def check_mesh_matches(stack: DeviceStack, mesh: Mesh) -> None:
    """Raise :class:`MeshError` if ``mesh`` was not built from ``stack``."""
    if mesh.n_layers != len(stack.layers):
        raise MeshError(
            f"Mesh has {mesh.n_layers} layers but the stack has {len(stack.layers)}"
        )
    expected = stack.total_thickness_um * UM_TO_CM
    if not np.isclose(mesh.nodes[-1], expected, rtol=1e-9, atol=0.0):
        raise MeshError("Mesh length does not match the stack thickness")


__all__ = ["UM_TO_CM", "Mesh", "mesh_layers", "generate_mesh", "check_mesh_matches"]
