"""External quantum efficiency from small-signal monochromatic probes."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from sunstack.config.models import SimulationConfig
from sunstack.config.validators import log_debug, log_info, log_warning
from sunstack.constants import A_TO_MA, Q
from sunstack.device.mesh import generate_mesh
from sunstack.device.stack import DeviceStack
from sunstack.errors import AnalysisError, ConfigError, SolverError
from sunstack.optics.generation import generation_profile
from sunstack.optics.spectrum import SolarSpectrum
from sunstack.solver.gummel import illuminate
from sunstack.solver.poisson import solve_equilibrium
from sunstack.solver.state import SimState


@dataclass(frozen=True, eq=False)
class QECurve:
    """EQE fraction per wavelength; failed wavelengths are NaN and listed in ``failures``."""

    wavelengths_nm: np.ndarray
    eqe: np.ndarray
    failures: list[tuple[float, str]] = field(default_factory=list)
    label: str = ""

    def __post_init__(self) -> None:
        values = self.eqe[np.isfinite(self.eqe)]
        if np.any(values < 0) or np.any(values > 1):
            raise AnalysisError("EQE values must lie in [0, 1]")

    def __len__(self) -> int:
        return int(self.wavelengths_nm.size)


def wavelength_grid(start: float, stop: float, step: float) -> list[float]:
    """start, start+step, … up to and including stop when it lands on the grid."""
    if step <= 0:
        raise ConfigError("Wavelength step must be positive", field="wl_step")
    if start >= stop:
        raise ConfigError("Wavelength start must be below stop", field="wl_start")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 9) for k in range(count)]


def _probe(
    stack: DeviceStack,
    equilibrium: SimState,
    wavelength: float,
    cfg: SimulationConfig,
) -> tuple[float, Optional[float], Optional[str]]:
    flux = cfg.qe.probe_flux
    spectrum = SolarSpectrum.monochromatic(wavelength, flux)
    generation = generation_profile(stack, equilibrium.mesh, spectrum, cfg.optics)
    try:
        state = illuminate(equilibrium, generation, cfg.solver)
    except SolverError as exc:
        return wavelength, None, str(exc)
    collected = abs(state.current - equilibrium.current) / (Q * flux * A_TO_MA)
    if collected > 1.0:
        return wavelength, None, f"collected current exceeds the incident photon flux (EQE {collected:.6g})"
    return wavelength, collected, None


def compute_qe(
    stack: DeviceStack,
    wavelengths: Sequence[float],
    cfg: Optional[SimulationConfig] = None,
    jobs: int = 1,
) -> QECurve:
    """EQE(λ) = |J(0 V, λ) − J_dark(0 V)| / (q·Φ) for each wavelength.

    Wavelengths are independent and run in a process pool when ``jobs > 1``.
    Per-wavelength solver failures, and probes collecting more carriers than
    photons arrive, leave a NaN gap and a ``failures`` entry instead of aborting.

    Raises:
        ConfigError: A wavelength outside the optical range.
    """
    cfg = cfg or SimulationConfig()
    lo, hi = cfg.optics.wavelength_min_nm, cfg.optics.wavelength_max_nm
    for wavelength in wavelengths:
        if not lo <= wavelength <= hi:
            raise ConfigError(
                f"Wavelength {wavelength:g} nm outside the optical range {lo:g}-{hi:g} nm",
                field="wavelengths",
            )

    mesh = generate_mesh(stack, cfg.mesh)
    equilibrium = solve_equilibrium(stack, mesh, cfg.solver)

    if jobs > 1 and len(wavelengths) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            futures = [
                executor.submit(_probe, stack, equilibrium, float(wl), cfg) for wl in wavelengths
            ]
            results = [future.result() for future in futures]
    else:
        results = [_probe(stack, equilibrium, float(wl), cfg) for wl in wavelengths]

    eqe = np.full(len(results), np.nan)
    failures: list[tuple[float, str]] = []
    for index, (wavelength, value, error) in enumerate(results):
        if error is not None:
            log_warning("QE point failed", wavelength_nm=wavelength, error=error)
            failures.append((wavelength, error))
            continue
        eqe[index] = value
        log_debug("QE point", wavelength_nm=wavelength, eqe=value)

    log_info("QE sweep complete", points=len(results), failures=len(failures))
    return QECurve(np.asarray(wavelengths, dtype=float), eqe, failures)


__all__ = ["QECurve", "wavelength_grid", "compute_qe"]
