"""High-level Python convenience functions for sunstack."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .analysis.curves import IVCurve, compute_jv
from .analysis.metrics import CellMetrics, extract_metrics
from .config.models import SimulationConfig
from .config.validators import log_info
from .device.io import load_device
from .device.mesh import generate_mesh
from .device.presets import preset as load_preset
from .device.stack import DeviceStack
from .errors import ConfigError
from .optics.generation import generation_profile
from .optics.spectrum import SolarSpectrum, am15g
from .solver.gummel import illuminate
from .solver.poisson import solve_equilibrium
from .solver.state import SimState


def resolve_stack(
    device: Optional[str | Path] = None,
    preset: Optional[str] = None,
    temperature: Optional[float] = None,
) -> DeviceStack:
    """Load a stack from a device file or a preset name.

    Args:
        device: Path to a JSON/YAML device file.
        preset: Name of a bundled preset (``pn-baseline``, ``ppn-optimized`` …).
        temperature: Optional override of the stack temperature (K).

    Raises:
        ConfigError: If both or neither of ``device`` and ``preset`` are given,
            or the device file is invalid.

    Example:
        >>> from sunstack import resolve_stack
        >>> resolve_stack(preset="ppn-optimized").labels
        ['GaAs', 'CIGS', 'CdS', 'ZnO']
    """
    if (device is None) == (preset is None):
        raise ConfigError("Pass exactly one of a device file or a preset", field="device")
    stack = load_device(device) if device is not None else load_preset(str(preset))
    if temperature is not None:
        stack = stack.with_temperature(temperature)
    return stack


@dataclass
class WorkingPoint:
    """Equilibrium and illuminated short-circuit states of one stack."""

    equilibrium: SimState
    illuminated: SimState
    pin: float

    @property
    def jsc(self) -> float:
        """Short-circuit current density (mA/cm², light convention)."""
        return -(self.illuminated.current - self.equilibrium.current)


def simulate(
    stack: DeviceStack,
    cfg: Optional[SimulationConfig] = None,
    spectrum: Optional[SolarSpectrum] = None,
) -> WorkingPoint:
    """Solve equilibrium, then switch the light on at 0 V.

    Raises:
        SolverError: If either solve fails.
    """
    cfg = cfg or SimulationConfig()
    spectrum = spectrum if spectrum is not None else am15g()
    mesh = generate_mesh(stack, cfg.mesh)
    equilibrium = solve_equilibrium(stack, mesh, cfg.solver)
    generation = generation_profile(stack, mesh, spectrum, cfg.optics)
    state = illuminate(equilibrium, generation, cfg.solver)
    point = WorkingPoint(equilibrium, state, spectrum.total_power)
    log_info("Working point solved", layers=stack.labels, jsc=point.jsc)
    return point


def simulate_jv(
    stack: DeviceStack,
    cfg: Optional[SimulationConfig] = None,
    spectrum: Optional[SolarSpectrum] = None,
) -> tuple[IVCurve, Optional[CellMetrics]]:
    """J-V curve plus metrics (``None`` for a dark sweep).

    Example:
        >>> from sunstack import preset, simulate_jv
        >>> curve, metrics = simulate_jv(preset("pn-baseline"))
        >>> 0 < metrics.voc < 1.3
        True
    """
    curve = compute_jv(stack, cfg, spectrum)
    metrics = extract_metrics(curve) if curve.illuminated else None
    return curve, metrics


__all__ = ["WorkingPoint", "resolve_stack", "simulate", "simulate_jv"]
