"""Poisson/drift-diffusion solvers."""

from .gummel import continuation_sweep, illuminate, iter_bias_states, solve_bias
from .linalg import solve_tridiagonal
from .poisson import built_in_potential, solve_equilibrium, solve_poisson
from .state import SimState, edge_currents, terminal_current

__all__ = [
    "SimState",
    "solve_equilibrium",
    "solve_bias",
    "continuation_sweep",
    "illuminate",
    "iter_bias_states",
    "solve_poisson",
    "solve_tridiagonal",
    "built_in_potential",
    "edge_currents",
    "terminal_current",
]
