"""Nonlinear Poisson solve and the dark equilibrium state."""

from __future__ import annotations

from typing import Optional

import numpy as np

from sunstack.config.models import SolverConfig
from sunstack.config.validators import log_debug
from sunstack.device.mesh import Mesh, check_mesh_matches
from sunstack.device.stack import DeviceStack
from sunstack.errors import ConvergenceError, SolverError
from sunstack.transport import BandParams, band_params
from .linalg import solve_tridiagonal
from .state import SimState, terminal_current


def damping_clamp(bands: BandParams, cfg: SolverConfig) -> float:
    """Largest accepted potential update per Newton step (V)."""
    return cfg.damping_clamp if cfg.damping_clamp is not None else 2 * bands.vt


def solve_poisson(
    bands: BandParams,
    psi: np.ndarray,
    efn: np.ndarray,
    efp: np.ndarray,
    cfg: SolverConfig,
    bias: Optional[float] = None,
) -> tuple[np.ndarray, list[float]]:
    """Newton iteration on Poisson's equation with frozen quasi-Fermi levels.

    Carrier densities follow ψ through the Boltzmann relations; ``psi[0]``
    and ``psi[-1]`` are held fixed. Returns the potential and the history of
    max-norm updates (V).

    Raises:
        ConvergenceError: When the update norm does not fall below
            ``cfg.potential_tolerance`` within ``cfg.max_poisson_iterations``.
    """
    mesh = bands.mesh
    vt = bands.vt
    coupling = bands.eps_edge / mesh.spacing
    dx = mesh.control_volumes[1:-1]
    clamp = damping_clamp(bands, cfg)
    size = psi.size

    lower = np.zeros(size)
    upper = np.zeros(size)
    diag = np.ones(size)
    lower[1:-1] = coupling[:-1]
    upper[1:-1] = coupling[1:]
    stiffness = -(coupling[:-1] + coupling[1:])

    psi = psi.copy()
    history: list[float] = []
    for _ in range(cfg.max_poisson_iterations):
        n = bands.electron_density(psi, efn)
        p = bands.hole_density(psi, efp)
        flux = coupling * np.diff(psi)
        rhs = np.zeros(size)
        rhs[1:-1] = -(flux[1:] - flux[:-1] + dx * (p - n + bands.net_doping)[1:-1])
        diag[1:-1] = stiffness - dx * (n + p)[1:-1] / vt

        update = solve_tridiagonal(lower, diag, upper, rhs, cfg.linear_solver)
        update = np.clip(update, -clamp, clamp)
        psi += update
        norm = float(np.max(np.abs(update)))
        history.append(norm)
        if not np.isfinite(norm):
            break
        if norm < cfg.potential_tolerance:
            return psi, history

    raise ConvergenceError(
        f"Poisson iteration did not converge in {len(history)} steps "
        f"(last update {history[-1]:.3e} V)",
        residual_history=history,
        bias=bias,
    )


def solve_equilibrium(
    stack: DeviceStack, mesh: Mesh, cfg: Optional[SolverConfig] = None
) -> SimState:
    """Dark, zero-bias solution with a flat Fermi level at 0 eV.

    Raises:
        ConvergenceError: Poisson iteration failed; carries the update history.
    """
    cfg = cfg or SolverConfig()
    check_mesh_matches(stack, mesh)
    bands = band_params(stack, mesh)
    if np.any(bands.ni <= 0):
        raise SolverError(
            f"Intrinsic density underflows at {stack.temperature} K; raise the temperature",
            bias=0.0,
        )

    zeros = np.zeros(mesh.n_nodes)
    psi, history = solve_poisson(bands, bands.equilibrium_guess(), zeros, zeros, cfg, bias=0.0)
    n = bands.electron_density(psi, zeros)
    p = bands.hole_density(psi, zeros)
    log_debug("Equilibrium solved", nodes=mesh.n_nodes, newton_steps=len(history))
    return SimState(
        bands=bands,
        psi=psi,
        n=n,
        p=p,
        efn=zeros.copy(),
        efp=zeros.copy(),
        current=terminal_current(bands, psi, n, p, zeros, zeros),
        bias=0.0,
        illuminated=False,
        converged=True,
        iterations=len(history),
        residual=history[-1] / bands.vt,
        residual_history=history,
    )


def built_in_potential(state: SimState) -> float:
    """Electrostatic potential drop between the two contacts (V)."""
    return float(state.psi[-1] - state.psi[0])


__all__ = ["damping_clamp", "solve_poisson", "solve_equilibrium", "built_in_potential"]
