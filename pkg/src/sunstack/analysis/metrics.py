"""Cell figures of merit from a J-V curve."""

from __future__ import annotations

from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict

from sunstack.errors import AnalysisError, VocOutOfRangeError
from .curves import IVCurve


class CellMetrics(BaseModel):
    """Jsc, Jmp (mA/cm²), Voc, Vmp (V), FF, PCE (fractions), Pmax, Pin (mW/cm²)."""

    model_config = ConfigDict(frozen=True)

    jsc: float
    voc: float
    ff: float
    pce: float
    vmp: float
    jmp: float
    pmax: float
    pin: float

    def value(self, metric: str) -> float:
        """Look up ``PCE``, ``FF``, ``Voc`` or ``Jsc`` by name."""
        try:
            return {"PCE": self.pce, "FF": self.ff, "Voc": self.voc, "Jsc": self.jsc}[metric]
        except KeyError:
            raise AnalysisError(f"Unknown metric '{metric}'") from None

    def to_record(self) -> dict[str, Any]:
        """Report form: FF and PCE in percent."""
        return {
            "Jsc_mA_cm2": self.jsc,
            "Voc_V": self.voc,
            "FF_percent": self.ff * 100,
            "PCE_percent": self.pce * 100,
            "Vmp_V": self.vmp,
            "Jmp_mA_cm2": self.jmp,
            "Pmax_mW_cm2": self.pmax,
            "Pin_mW_cm2": self.pin,
        }


def pce_identity(voc: float, jsc: float, ff: float, pin: float) -> float:
    """PCE = Voc·Jsc·FF / Pin (fraction, with Pin in mW/cm²)."""
    return voc * jsc * ff / pin


def _zero_crossing(v: np.ndarray, j: np.ndarray) -> float:
    for k in range(v.size - 1):
        if v[k + 1] > 0 and j[k] > 0 >= j[k + 1]:
            return float(v[k] + j[k] * (v[k + 1] - v[k]) / (j[k] - j[k + 1]))
    raise VocOutOfRangeError(
        f"Current does not cross zero up to V_max = {v[-1]:.3f} V; raise the maximum bias",
        v_max=float(v[-1]),
    )


def extract_metrics(curve: IVCurve) -> CellMetrics:
    """Jsc, Voc, maximum power point, FF and PCE of an illuminated curve.

    Jsc is the current at 0 V, Voc the linearly interpolated first zero
    crossing, and the maximum power point the best sample refined by a parabola
    through it and its neighbours (never below the best sample).

    Raises:
        AnalysisError: Fewer than three samples, no photocurrent or no
            incident power.
        VocOutOfRangeError: The curve does not cross zero.
    """
    v = curve.voltage
    j = curve.current
    if v.size < 3:
        raise AnalysisError(f"Need at least 3 J-V samples, got {v.size}")
    if v[0] > 0 or v[-1] < 0:
        raise AnalysisError("J-V samples must include 0 V")
    if curve.pin <= 0:
        raise AnalysisError("Incident power must be positive to compute efficiency")

    jsc = float(np.interp(0.0, v, j))
    if jsc <= 0:
        raise AnalysisError(f"No photocurrent at 0 V (J = {jsc:.4g} mA/cm²)")
    voc = _zero_crossing(v, j)

    power = v * j
    candidates = np.flatnonzero((v > 0) & (v < voc) & (j > 0))
    if candidates.size == 0:
        raise AnalysisError("No forward-bias sample below Voc; reduce the voltage step")
    best = int(candidates[np.argmax(power[candidates])])
    pmax = float(power[best])
    vmp = float(v[best])

    if 0 < best < v.size - 1:
        a, b, c = np.polyfit(v[best - 1 : best + 2], power[best - 1 : best + 2], 2)
        if a < 0:
            vertex = -b / (2 * a)
            if v[best - 1] < vertex < min(v[best + 1], voc):
                peak = float(np.polyval((a, b, c), vertex))
                if peak > pmax:
                    pmax, vmp = peak, float(vertex)

    jmp = pmax / vmp
    return CellMetrics(
        jsc=jsc,
        voc=voc,
        ff=pmax / (voc * jsc),
        pce=pmax / curve.pin,
        vmp=vmp,
        jmp=jmp,
        pmax=pmax,
        pin=curve.pin,
    )


__all__ = ["CellMetrics", "extract_metrics", "pce_identity"]
