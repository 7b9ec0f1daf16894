"""CSV/JSON writers for curves, metrics and band diagrams.

Floats are written with a fixed format so repeated runs are byte-identical.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Optional

import pandas as pd

from sunstack.solver.state import SimState
from .bands import band_diagram
from .curves import IVCurve, power_curve
from .metrics import CellMetrics
from .qe import QECurve

FLOAT_FORMAT = "%.10g"

METRIC_KEYS = (
    "Jsc_mA_cm2",
    "Voc_V",
    "FF_percent",
    "PCE_percent",
    "Vmp_V",
    "Jmp_mA_cm2",
    "Pmax_mW_cm2",
    "Pin_mW_cm2",
)


def write_frame(frame: pd.DataFrame, path: str | Path) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(target, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return target


def curve_frame(curve: IVCurve) -> pd.DataFrame:
    return pd.DataFrame({"V_volt": curve.voltage, "J_mA_cm2": curve.current})


def power_frame(curve: IVCurve, metrics: Optional[CellMetrics] = None) -> pd.DataFrame:
    voltage, power = power_curve(curve, metrics)
    return pd.DataFrame({"V_volt": voltage, "P_mW_cm2": power})


def qe_frame(qe: QECurve) -> pd.DataFrame:
    return pd.DataFrame({"wavelength_nm": qe.wavelengths_nm, "EQE": qe.eqe})


def write_curve_csv(curve: IVCurve, path: str | Path) -> Path:
    """``V_volt,J_mA_cm2``."""
    return write_frame(curve_frame(curve), path)


def write_power_csv(
    curve: IVCurve, path: str | Path, metrics: Optional[CellMetrics] = None
) -> Path:
    """``V_volt,P_mW_cm2``."""
    return write_frame(power_frame(curve, metrics), path)


def write_qe_csv(qe: QECurve, path: str | Path) -> Path:
    """``wavelength_nm,EQE``; failed wavelengths have an empty EQE cell."""
    return write_frame(qe_frame(qe), path)


def write_qe_failures(qe: QECurve, path: str | Path) -> Optional[Path]:
    """One ``wavelength_nm: error`` line per failed wavelength; nothing if none failed."""
    if not qe.failures:
        return None
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"{wavelength:g} nm: {error}" for wavelength, error in qe.failures]
    target.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return target


def write_band_diagram_csv(state: SimState, path: str | Path) -> Path:
    """``x_um,Ec_eV,Ev_eV,EFn_eV,EFp_eV``."""
    return write_frame(band_diagram(state), path)


def metrics_record(
    metrics: Optional[CellMetrics], **extra: Any
) -> dict[str, Any]:
    """Metrics in report form, all keys ``None`` when there are no metrics."""
    record: dict[str, Any] = (
        metrics.to_record() if metrics is not None else {key: None for key in METRIC_KEYS}
    )
    record.update(extra)
    return record


def write_json(data: dict[str, Any], path: str | Path) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")
    return target


def write_metrics_json(
    metrics: Optional[CellMetrics], path: str | Path, **extra: Any
) -> Path:
    """Write ``metrics.json`` (FF and PCE in percent)."""
    return write_json(metrics_record(metrics, **extra), path)


__all__ = [
    "FLOAT_FORMAT",
    "METRIC_KEYS",
    "write_frame",
    "curve_frame",
    "power_frame",
    "qe_frame",
    "write_curve_csv",
    "write_power_csv",
    "write_qe_csv",
    "write_qe_failures",
    "write_band_diagram_csv",
    "metrics_record",
    "write_json",
    "write_metrics_json",
]
