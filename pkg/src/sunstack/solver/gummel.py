"""Biased solutions: Gummel iteration and voltage continuation.

The bias is applied to the back contact (node 0): its potential is raised by
V and its quasi-Fermi levels sit at −V while the front contact stays at the
equilibrium reference. Forward bias of a p-back/n-front stack is positive V
and drives positive current from back to front; photocurrent is negative.
"""

from __future__ import annotations

import math
from typing import Iterator, Optional, Sequence

import numpy as np

from sunstack.config.models import SolverConfig
from sunstack.config.validators import log_debug, log_info
from sunstack.device.mesh import Mesh
from sunstack.device.stack import DeviceStack
from sunstack.errors import ConfigError, ConvergenceError, NegativeDensityError, SolverError
from sunstack.optics.generation import GenerationProfile
from sunstack.transport import BandParams, bernoulli
from .linalg import solve_tridiagonal
from .poisson import solve_equilibrium, solve_poisson
from .state import SimState, terminal_current

_ILLUMINATION_RAMP = (1e-3, 1e-2, 1e-1, 0.3, 1.0)


def _recombination_terms(bands: BandParams, n: np.ndarray, p: np.ndarray):
    """1/D of the linearized SRH rate, with D = τp(n + n1) + τn(p + p1)."""
    with np.errstate(invalid="ignore"):
        denominator = bands.tau_p * (n + bands.n1) + bands.tau_n * (p + bands.p1)
    return 1.0 / denominator


def _solve_electrons(
    bands: BandParams,
    psi: np.ndarray,
    p: np.ndarray,
    inv_d: np.ndarray,
    rate: np.ndarray,
    cfg: SolverConfig,
) -> np.ndarray:
    mesh = bands.mesh
    vt = bands.vt
    dx = mesh.control_volumes
    delta = np.diff(bands.electron_potential(psi)) / vt
    c = bands.mu_e_edge * vt / mesh.spacing
    forward = c * bernoulli(delta)
    backward = c * bernoulli(-delta)
    capture = dx * p * (inv_d + bands.radiative)
    thermal = dx * bands.ni2 * (inv_d + bands.radiative)

    size = psi.size
    lower = np.zeros(size)
    upper = np.zeros(size)
    diag = np.ones(size)
    rhs = np.empty(size)
    lower[1:-1] = backward[:-1]
    upper[1:-1] = forward[1:]
    diag[1:-1] = -backward[1:] - forward[:-1] - capture[1:-1]
    rhs[1:-1] = -(dx[1:-1] * rate[1:-1] + thermal[1:-1])
    rhs[0], rhs[-1] = bands.contact_electrons
    return solve_tridiagonal(lower, diag, upper, rhs, cfg.linear_solver)


def _solve_holes(
    bands: BandParams,
    psi: np.ndarray,
    n: np.ndarray,
    inv_d: np.ndarray,
    rate: np.ndarray,
    cfg: SolverConfig,
) -> np.ndarray:
    mesh = bands.mesh
    vt = bands.vt
    dx = mesh.control_volumes
    delta = np.diff(bands.hole_potential(psi)) / vt
    c = bands.mu_h_edge * vt / mesh.spacing
    forward = c * bernoulli(delta)
    backward = c * bernoulli(-delta)
    capture = dx * n * (inv_d + bands.radiative)
    thermal = dx * bands.ni2 * (inv_d + bands.radiative)

    size = psi.size
    lower = np.zeros(size)
    upper = np.zeros(size)
    diag = np.ones(size)
    rhs = np.empty(size)
    lower[1:-1] = -forward[:-1]
    upper[1:-1] = -backward[1:]
    diag[1:-1] = forward[1:] + backward[:-1] + capture[1:-1]
    rhs[1:-1] = dx[1:-1] * rate[1:-1] + thermal[1:-1]
    rhs[0], rhs[-1] = bands.contact_holes
    return solve_tridiagonal(lower, diag, upper, rhs, cfg.linear_solver)


def _check_positive(values: np.ndarray, carrier: str, bias: float) -> None:
    bad = ~(values > 0) | ~np.isfinite(values)
    if np.any(bad):
        node = int(np.argmax(bad))
        raise NegativeDensityError(
            f"Non-positive {carrier} density {values[node]:.3e} cm⁻³ at node {node} "
            f"(V = {bias:.4f} V); reduce the damping clamp or the voltage step",
            node=node,
            bias=bias,
        )


def solve_bias(
    prev: SimState,
    voltage: float,
    generation: Optional[GenerationProfile] = None,
    cfg: Optional[SolverConfig] = None,
) -> SimState:
    """Gummel iteration at ``voltage`` seeded from ``prev``.

    Each pass solves Poisson with frozen quasi-Fermi levels, then the linear
    electron and hole continuity equations with the recombination rate
    linearized around the current densities. The pass residual is the largest
    change of ψ, EFn or EFp in thermal-voltage units.

    Raises:
        ConvergenceError: No convergence within ``cfg.max_gummel_iterations``.
        NegativeDensityError: A continuity solve produced a non-positive density.
    """
    cfg = cfg or SolverConfig()
    bands = prev.bands
    vt = bands.vt
    size = prev.psi.size

    psi = prev.psi.copy()
    psi[0] = bands.psi_contact[0] + voltage
    psi[-1] = bands.psi_contact[1]
    efn = prev.efn.copy()
    efp = prev.efp.copy()
    efn[0] = efp[0] = -voltage
    efn[-1] = efp[-1] = 0.0
    rate = generation.rate if generation is not None else np.zeros(size)

    history: list[float] = []
    for iteration in range(1, cfg.max_gummel_iterations + 1):
        psi_new, _ = solve_poisson(bands, psi, efn, efp, cfg, bias=voltage)
        n_guess = bands.electron_density(psi_new, efn)
        p_guess = bands.hole_density(psi_new, efp)

        n = _solve_electrons(
            bands, psi_new, p_guess, _recombination_terms(bands, n_guess, p_guess), rate, cfg
        )
        _check_positive(n, "electron", voltage)
        p = _solve_holes(bands, psi_new, n, _recombination_terms(bands, n, p_guess), rate, cfg)
        _check_positive(p, "hole", voltage)

        efn_new = bands.electron_fermi(psi_new, n)
        efp_new = bands.hole_fermi(psi_new, p)
        residual = (
            max(
                float(np.max(np.abs(psi_new - psi))),
                float(np.max(np.abs(efn_new - efn))),
                float(np.max(np.abs(efp_new - efp))),
            )
            / vt
        )
        history.append(residual)
        psi, efn, efp = psi_new, efn_new, efp_new

        if not math.isfinite(residual):
            break
        if residual < cfg.residual_tolerance:
            current = terminal_current(bands, psi, n, p, efn, efp)
            log_debug(
                "Gummel converged",
                bias=round(voltage, 6),
                iterations=iteration,
                current_mA_cm2=current,
            )
            return SimState(
                bands=bands,
                psi=psi,
                n=n,
                p=p,
                efn=efn,
                efp=efp,
                current=current,
                bias=float(voltage),
                illuminated=generation is not None and not generation.is_dark,
                converged=True,
                iterations=iteration,
                residual=residual,
                residual_history=history,
                generation=generation,
            )

    raise ConvergenceError(
        f"Gummel iteration did not converge at V = {voltage:.4f} V after "
        f"{len(history)} passes (last residual {history[-1]:.3e})",
        residual_history=history,
        bias=voltage,
    )


def illuminate(
    dark: SimState, generation: GenerationProfile, cfg: SolverConfig
) -> SimState:
    """Switch the light on at the dark state's bias, ramping intensity on failure."""
    try:
        return solve_bias(dark, dark.bias, generation, cfg)
    except SolverError as exc:
        log_debug("Direct illumination failed, ramping intensity", reason=str(exc))
    state = dark
    for factor in _ILLUMINATION_RAMP:
        state = solve_bias(state, dark.bias, generation.scaled(factor), cfg)
    return solve_bias(state, dark.bias, generation, cfg)


def _step_to(
    state: SimState,
    target: float,
    generation: Optional[GenerationProfile],
    cfg: SolverConfig,
) -> SimState:
    span = target - state.bias
    steps = max(1, math.ceil(abs(span) / cfg.voltage_step - 1e-9))
    last: Optional[SolverError] = None
    for halving in range(cfg.max_step_halvings + 1):
        try:
            current = state
            for k in range(1, steps + 1):
                voltage = target if k == steps else state.bias + span * k / steps
                current = solve_bias(current, voltage, generation, cfg)
            return current
        except SolverError as exc:
            last = exc
            steps *= 2
            log_debug(
                "Bias step failed, subdividing",
                target=target,
                halving=halving + 1,
                substeps=steps,
                reason=str(exc),
            )

    message = f"Bias point V = {target:.4f} V failed after {cfg.max_step_halvings} step halvings: {last}"
    if isinstance(last, ConvergenceError):
        raise ConvergenceError(
            message, residual_history=last.residual_history, bias=target, cause=last
        ) from last
    raise SolverError(message, bias=target, cause=last) from last


def _check_targets(targets: Sequence[float]) -> None:
    if not targets:
        raise ConfigError("No bias points requested")
    values = np.asarray(targets, dtype=float)
    if not np.all(np.isfinite(values)):
        raise ConfigError("Bias points must be finite")
    if values.size > 1:
        steps = np.diff(values)
        if not (np.all(steps > 0) or np.all(steps < 0)):
            raise ConfigError("Bias points must move monotonically away from 0 V")


def iter_bias_states(
    stack: DeviceStack,
    mesh: Mesh,
    targets: Sequence[float],
    generation: Optional[GenerationProfile] = None,
    cfg: Optional[SolverConfig] = None,
    equilibrium: Optional[SimState] = None,
) -> Iterator[SimState]:
    """Yield warm-started solutions at each bias in ``targets``, lazily."""
    cfg = cfg or SolverConfig()
    _check_targets(targets)
    state = equilibrium if equilibrium is not None else solve_equilibrium(stack, mesh, cfg)
    if generation is not None and not generation.is_dark:
        state = illuminate(state, generation, cfg)
    for target in targets:
        state = _step_to(state, float(target), generation, cfg)
        yield state


def continuation_sweep(
    stack: DeviceStack,
    mesh: Mesh,
    targets: Sequence[float],
    generation: Optional[GenerationProfile] = None,
    cfg: Optional[SolverConfig] = None,
) -> list[SimState]:
    """Solve every bias in ``targets``, each seeded from the previous one.

    Steps wider than ``cfg.voltage_step`` are subdivided; a failing step is
    retried with halved sub-steps up to ``cfg.max_step_halvings`` times.

    Raises:
        SolverError: With ``bias`` set to the failing target.
    """
    states = list(iter_bias_states(stack, mesh, targets, generation, cfg))
    log_info(
        "Bias sweep complete",
        points=len(states),
        v_first=float(targets[0]),
        v_last=float(targets[-1]),
    )
    return states


__all__ = ["solve_bias", "illuminate", "iter_bias_states", "continuation_sweep"]
