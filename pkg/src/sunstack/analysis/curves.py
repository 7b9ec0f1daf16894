"""J-V and P-V curves."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, TYPE_CHECKING

import numpy as np

from sunstack.config.models import SimulationConfig
from sunstack.config.validators import log_debug, log_warning
from sunstack.device.mesh import generate_mesh
from sunstack.device.stack import DeviceStack
from sunstack.errors import AnalysisError, SolverError, VocOutOfRangeError
from sunstack.optics.generation import generation_profile
from sunstack.optics.spectrum import SolarSpectrum, am15g
from sunstack.solver.gummel import iter_bias_states

if TYPE_CHECKING:  # pragma: no cover
    from .metrics import CellMetrics


@dataclass(frozen=True, eq=False)
class IVCurve:
    """Bias samples (V) with current density in the light convention (mA/cm²).

    Photocurrent is positive, so an illuminated cell starts at +Jsc and
    crosses zero at Voc.
    """

    voltage: np.ndarray
    current: np.ndarray
    pin: float
    illuminated: bool = True
    truncated: bool = False
    label: str = ""

    def __post_init__(self) -> None:
        v = np.asarray(self.voltage, dtype=float)
        j = np.asarray(self.current, dtype=float)
        if v.shape != j.shape or v.ndim != 1:
            raise AnalysisError("Voltage and current samples must be 1-D and equally long")
        if v.size > 1 and np.any(np.diff(v) <= 0):
            raise AnalysisError("Voltage samples must be strictly increasing")
        object.__setattr__(self, "voltage", v)
        object.__setattr__(self, "current", j)

    def __len__(self) -> int:
        return int(self.voltage.size)


def bias_grid(v_max: float, v_step: float) -> list[float]:
    """0, v_step, 2·v_step, … up to and including v_max when it lands on the grid."""
    if v_step <= 0:
        raise ValueError("v_step must be positive")
    count = int(math.floor(v_max / v_step + 1e-9)) + 1
    return [round(k * v_step, 12) for k in range(count)]


def compute_jv(
    stack: DeviceStack,
    cfg: Optional[SimulationConfig] = None,
    spectrum: Optional[SolarSpectrum] = None,
    *,
    require_crossing: bool = True,
) -> IVCurve:
    """Sweep 0 → V_max under illumination (or dark) and collect J-V samples.

    With ``cfg.jv.points_past_voc`` set the sweep stops that many samples after
    the current changes sign. A solver failure after the sign change truncates
    the curve with a warning; before it, the failure propagates.

    Raises:
        SolverError: A bias point before the zero crossing failed.
        VocOutOfRangeError: Illuminated curve without a zero crossing and
            ``require_crossing`` set.
    """
    cfg = cfg or SimulationConfig()
    spectrum = spectrum if spectrum is not None else am15g()
    mesh = generate_mesh(stack, cfg.mesh)
    generation = None
    if not cfg.jv.dark:
        generation = generation_profile(stack, mesh, spectrum, cfg.optics)
    illuminated = generation is not None and not generation.is_dark
    grid = bias_grid(cfg.jv.v_max, cfg.jv.v_step)

    voltages: list[float] = []
    currents: list[float] = []
    past_crossing = 0
    truncated = False
    states = iter_bias_states(stack, mesh, grid, generation, cfg.solver)
    while True:
        try:
            state = next(states)
        except StopIteration:
            break
        except SolverError as exc:
            if illuminated and past_crossing > 0 and len(voltages) >= 3:
                log_warning(
                    "Solver failed beyond Voc, truncating J-V curve",
                    bias=exc.bias,
                    samples=len(voltages),
                )
                truncated = True
                break
            raise
        voltages.append(state.bias)
        currents.append(-state.current)
        if illuminated and (past_crossing or currents[-1] <= 0):
            past_crossing += 1
            if cfg.jv.points_past_voc is not None and past_crossing >= cfg.jv.points_past_voc:
                break

    if illuminated and require_crossing and past_crossing == 0:
        raise VocOutOfRangeError(
            f"Current does not cross zero up to V_max = {cfg.jv.v_max:g} V; raise the maximum bias",
            v_max=cfg.jv.v_max,
        )
    log_debug("J-V curve computed", samples=len(voltages), truncated=truncated)
    return IVCurve(
        np.asarray(voltages),
        np.asarray(currents),
        pin=spectrum.total_power if illuminated else 0.0,
        illuminated=illuminated,
        truncated=truncated,
    )


def power_curve(
    curve: IVCurve, metrics: Optional["CellMetrics"] = None
) -> tuple[np.ndarray, np.ndarray]:
    """P = V·J samples (mW/cm²).

    When ``metrics`` is given the refined maximum power point is merged into
    the samples, so the curve peaks at exactly ``metrics.pmax``.
    """
    voltage = curve.voltage
    power = curve.voltage * curve.current
    if metrics is not None and not np.any(np.isclose(voltage, metrics.vmp, rtol=0, atol=1e-12)):
        index = int(np.searchsorted(voltage, metrics.vmp))
        voltage = np.insert(voltage, index, metrics.vmp)
        power = np.insert(power, index, metrics.pmax)
    return voltage, power


__all__ = ["IVCurve", "bias_grid", "compute_jv", "power_curve"]
