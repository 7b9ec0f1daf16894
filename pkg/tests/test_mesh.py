"""Tests for mesh generation."""

from __future__ import annotations

import numpy as np
import pytest

from sunstack import MeshError, generate_mesh, preset
from sunstack.config import MeshConfig
from sunstack.device import check_mesh_matches, mesh_layers


def test_interfaces_fall_on_layer_boundaries():
    stack = preset("pn-baseline")

    mesh = generate_mesh(stack)

    boundaries_um = np.cumsum([0.0] + [layer.thickness_um for layer in stack.layers])
    assert mesh.n_layers == 3
    assert np.allclose(mesh.positions_um()[list(mesh.interface_nodes)], boundaries_um, rtol=0, atol=1e-12)
    assert np.all(np.diff(mesh.nodes) > 0)


def test_graded_mesh_is_fine_at_interfaces():
    cfg = MeshConfig()
    mesh = mesh_layers([1.0, 1.0], cfg)

    h_um = mesh.spacing * 1e4
    middle = mesh.interface_nodes[1]

    assert h_um[0] == pytest.approx(cfg.min_spacing_um, rel=0.2)
    assert h_um[middle] == pytest.approx(cfg.min_spacing_um, rel=0.2)
    assert h_um.max() <= cfg.max_spacing_um * 1.2
    assert np.all(h_um[1:] / h_um[:-1] <= cfg.grading_ratio * 1.001)


def test_node_ownership_and_edges():
    mesh = mesh_layers([0.5, 0.5, 0.5])

    assert mesh.layer_of_node[0] == 0
    assert mesh.layer_of_node[-1] == 2
    for index, node in enumerate(mesh.interface_nodes[1:-1], start=0):
        assert mesh.layer_of_node[node] == index
        assert mesh.layer_of_node[node + 1] == index + 1
    assert mesh.layer_of_edge.size == mesh.n_nodes - 1


def test_control_volumes_sum_to_device_length():
    mesh = generate_mesh(preset("ppn-optimized"))

    assert mesh.control_volumes.sum() == pytest.approx(11.0e-4, rel=1e-12)


def test_uniform_policy_node_count():
    cfg = MeshConfig(policy="uniform", nodes_per_layer=21)

    mesh = mesh_layers([0.5, 2.0], cfg)

    assert mesh.n_nodes == 21 + 20
    assert mesh.policy == "uniform"


def test_thin_layer_keeps_minimum_interior_nodes():
    cfg = MeshConfig(min_interior_nodes=12)

    mesh = mesh_layers([0.005, 1.0], cfg)

    assert mesh.interface_nodes[1] - 1 >= 12


def test_node_budget_exceeded():
    cfg = MeshConfig(min_spacing_um=0.001, max_spacing_um=0.001, node_budget=500)

    with pytest.raises(MeshError, match="budget|nodes"):
        mesh_layers([5.0, 5.0], cfg)


def test_mesh_stack_mismatch_detected():
    mesh = generate_mesh(preset("pn-baseline"))

    with pytest.raises(MeshError):
        check_mesh_matches(preset("ppn-optimized"), mesh)
    with pytest.raises(MeshError):
        check_mesh_matches(preset("pn-optimized"), mesh)


@pytest.mark.parametrize("name", ["pn-baseline", "ppn-optimized"])
def test_halving_min_spacing_refines_without_moving_interfaces(name):
    stack = preset(name)
    coarse_cfg = MeshConfig()
    fine_cfg = MeshConfig(min_spacing_um=coarse_cfg.min_spacing_um / 2)

    coarse = generate_mesh(stack, coarse_cfg)
    fine = generate_mesh(stack, fine_cfg)

    assert fine.n_nodes >= coarse.n_nodes
    assert np.allclose(
        fine.positions_um()[list(fine.interface_nodes)],
        coarse.positions_um()[list(coarse.interface_nodes)],
        rtol=0,
        atol=1e-12,
    )
    assert fine.spacing.min() < coarse.spacing.min()
