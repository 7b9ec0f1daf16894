"""Tests for the linear solvers, equilibrium and biased solutions."""

from __future__ import annotations

import numpy as np
import pytest

from sunstack import (
    ConfigError,
    ConvergenceError,
    SolarSpectrum,
    build_stack,
    continuation_sweep,
    generate_mesh,
    generation_profile,
    illuminate,
    preset,
    solve_bias,
    solve_equilibrium,
)
from sunstack.config import SolverConfig
from sunstack.constants import A_TO_MA, Q, thermal_voltage
from sunstack.device import PRESET_NAMES
from sunstack.solver import built_in_potential
from sunstack.solver.linalg import THOMAS_MAX_SIZE, banded, solve_tridiagonal, thomas


def _homojunction():
    return build_stack(
        [
            ("p-CIGS", 1.0, "acceptor", 1e16, "p-side"),
            ("p-CIGS", 1.0, "donor", 1e16, "n-side"),
        ]
    )


def _random_system(size: int, seed: int = 7):
    rng = np.random.default_rng(seed)
    lower = rng.uniform(-1, 1, size)
    upper = rng.uniform(-1, 1, size)
    diag = 3.0 + rng.uniform(0, 1, size)
    rhs = rng.uniform(-5, 5, size)
    return lower, diag, upper, rhs


def _dense(lower, diag, upper):
    return np.diag(diag) + np.diag(lower[1:], -1) + np.diag(upper[:-1], 1)


def test_thomas_and_banded_agree_with_dense_solve():
    lower, diag, upper, rhs = _random_system(50)
    expected = np.linalg.solve(_dense(lower, diag, upper), rhs)

    assert np.allclose(thomas(lower, diag, upper, rhs), expected, rtol=1e-12, atol=1e-12)
    assert np.allclose(banded(lower, diag, upper, rhs), expected, rtol=1e-12, atol=1e-12)


def test_zero_pivot_falls_back_to_pivoted_solve():
    lower = np.array([0.0, 1.0])
    diag = np.array([0.0, 0.0])
    upper = np.array([1.0, 0.0])
    rhs = np.array([2.0, 3.0])

    with pytest.raises(ArithmeticError):
        thomas(lower, diag, upper, rhs)
    assert np.allclose(solve_tridiagonal(lower, diag, upper, rhs), [3.0, 2.0])


@pytest.mark.parametrize(
    ("size", "method", "uses_thomas"),
    [
        (THOMAS_MAX_SIZE, "auto", True),
        (THOMAS_MAX_SIZE + 1, "auto", False),
        (500, "thomas", True),
        (10, "banded", False),
    ],
)
def test_auto_solver_sends_large_systems_to_banded_lu(monkeypatch, size, method, uses_thomas):
    calls = []

    def counting_thomas(*system):
        calls.append(system[1].size)
        return thomas(*system)

    monkeypatch.setattr("sunstack.solver.linalg.thomas", counting_thomas)
    lower, diag, upper, rhs = _random_system(size)

    x = solve_tridiagonal(lower, diag, upper, rhs, method)

    assert np.allclose(_dense(lower, diag, upper) @ x, rhs)
    assert calls == ([size] if uses_thomas else [])


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_equilibrium_is_current_free_and_obeys_mass_action(name):
    stack = preset(name)
    mesh = generate_mesh(stack)

    state = solve_equilibrium(stack, mesh)

    assert state.converged
    assert abs(state.current) < 1e-6
    assert np.allclose(state.n * state.p, state.bands.ni2, rtol=1e-6)
    assert np.all(state.efn == 0.0)
    assert np.all(state.efp == 0.0)
    assert state.psi[0] == pytest.approx(state.bands.psi_contact[0])
    assert state.psi[-1] == pytest.approx(state.bands.psi_contact[1])


def test_built_in_potential_matches_depletion_estimate():
    stack = _homojunction()
    state = solve_equilibrium(stack, generate_mesh(stack))
    ni2 = state.bands.ni2[0]

    expected = thermal_voltage(300.0) * np.log(1e16 * 1e16 / ni2)

    assert built_in_potential(state) == pytest.approx(expected, rel=0.05)


def test_heterojunction_offset_survives_in_equilibrium():
    stack = preset("pn-baseline")
    state = solve_equilibrium(stack, generate_mesh(stack))
    node = state.mesh.interface_nodes[1]

    offset = state.conduction_band[node + 1] - state.conduction_band[node]

    assert offset == pytest.approx(0.1, abs=5e-3)


def test_dark_forward_bias_drives_positive_current():
    stack = _homojunction()
    mesh = generate_mesh(stack)

    states = continuation_sweep(stack, mesh, [0.1, 0.2])

    assert [s.bias for s in states] == [0.1, 0.2]
    assert all(s.converged for s in states)
    assert 0 < states[0].current < states[1].current
    jn, jp = states[1].edge_currents()
    assert jn.size == jp.size == mesh.n_nodes - 1


def test_non_monotone_bias_schedule_rejected():
    stack = preset("pn-baseline")

    with pytest.raises(ConfigError, match="monotonically"):
        continuation_sweep(stack, generate_mesh(stack), [0.0, 0.2, 0.1])


def test_exhausted_step_halvings_report_the_target_bias():
    stack = _homojunction()
    cfg = SolverConfig(max_gummel_iterations=1, max_step_halvings=0)

    with pytest.raises(ConvergenceError) as exc:
        continuation_sweep(stack, generate_mesh(stack), [0.3], cfg=cfg)

    assert exc.value.bias == 0.3
    assert exc.value.residual_history
    assert "step halvings" in str(exc.value)


def _heterojunction():
    return build_stack([("p-CIGS", 1.0, "acceptor", 1e16), ("n-CdS", 0.1, "donor", 1e17)])


@pytest.fixture(scope="module")
def lit_heterojunction():
    stack = _heterojunction()
    mesh = generate_mesh(stack)
    equilibrium = solve_equilibrium(stack, mesh)
    generation = generation_profile(stack, mesh, SolarSpectrum.monochromatic(700.0, 1e17))
    return equilibrium, generation, illuminate(equilibrium, generation, SolverConfig())


def test_illuminated_short_circuit_current_is_negative(lit_heterojunction):
    equilibrium, generation, state = lit_heterojunction

    assert state.converged
    assert state.bias == 0.0
    assert state.current < 0
    # cannot collect more than is absorbed
    assert -state.current <= Q * generation.absorbed_flux * A_TO_MA * (1 + 1e-6)


@pytest.mark.parametrize("bias", [0.0, 0.3])
def test_total_current_is_uniform_across_edges(lit_heterojunction, bias):
    equilibrium, generation, state = lit_heterojunction
    if bias:
        state = continuation_sweep(_heterojunction(), state.mesh, [bias], generation)[-1]

    jn, jp = state.edge_currents()
    total = jn + jp

    assert np.max(np.abs(total - state.current)) <= 1e-4 * np.max(np.abs(jn))


@pytest.mark.parametrize("illuminated", [False, True])
def test_resolving_at_the_same_bias_changes_nothing(lit_heterojunction, illuminated):
    equilibrium, generation, state = lit_heterojunction
    prev = state if illuminated else continuation_sweep(_heterojunction(), state.mesh, [0.2])[-1]

    again = solve_bias(prev, prev.bias, generation if illuminated else None)

    assert again.converged
    assert again.iterations <= 3
    assert again.current == pytest.approx(prev.current, rel=1e-5, abs=1e-9)
    assert np.allclose(again.psi, prev.psi, atol=1e-6)


def test_zero_generation_matches_dark_solution(lit_heterojunction):
    equilibrium, generation, _ = lit_heterojunction
    stack = _heterojunction()

    dark = continuation_sweep(stack, equilibrium.mesh, [0.1, 0.3])
    unlit = continuation_sweep(stack, equilibrium.mesh, [0.1, 0.3], generation.scaled(0.0))

    for d, u in zip(dark, unlit):
        assert u.current == pytest.approx(d.current, rel=1e-9, abs=1e-15)
        assert np.allclose(u.psi, d.psi, rtol=0, atol=1e-12)
        assert np.allclose(u.n, d.n, rtol=1e-9)
