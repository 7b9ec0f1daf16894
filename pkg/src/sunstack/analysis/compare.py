"""Side-by-side J-V, P-V and QE of several stacks."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence

import pandas as pd

from sunstack.config.models import SimulationConfig
from sunstack.config.validators import log_info, log_warning
from sunstack.device.stack import DeviceStack
from sunstack.errors import AnalysisError
from sunstack.optics.spectrum import SolarSpectrum
from .curves import IVCurve, compute_jv, power_curve
from .export import METRIC_KEYS, write_frame
from .metrics import CellMetrics, extract_metrics
from .qe import QECurve, compute_qe


@dataclass
class Comparison:
    """Curves and metrics keyed by stack label, in insertion order."""

    curves: dict[str, IVCurve] = field(default_factory=dict)
    metrics: dict[str, Optional[CellMetrics]] = field(default_factory=dict)
    qe: dict[str, QECurve] = field(default_factory=dict)


def compare_stacks(
    stacks: Mapping[str, DeviceStack],
    cfg: Optional[SimulationConfig] = None,
    spectrum: Optional[SolarSpectrum] = None,
    wavelengths: Optional[Sequence[float]] = None,
    jobs: int = 1,
) -> Comparison:
    """Run J-V (and QE when ``wavelengths`` is given) for every stack."""
    cfg = cfg or SimulationConfig()
    result = Comparison()
    for label, stack in stacks.items():
        curve = compute_jv(stack, cfg, spectrum)
        result.curves[label] = curve
        try:
            result.metrics[label] = extract_metrics(curve)
        except AnalysisError as exc:
            log_warning("No metrics for stack", stack=label, error=str(exc))
            result.metrics[label] = None
        if wavelengths:
            result.qe[label] = compute_qe(stack, wavelengths, cfg, jobs=jobs)
        log_info("Compared stack", stack=label)
    return result


def _merge(series: dict[str, pd.Series], index_name: str) -> pd.DataFrame:
    frame = pd.concat(series, axis=1).sort_index()
    frame.index.name = index_name
    return frame.reset_index()


def comparison_frames(result: Comparison) -> dict[str, pd.DataFrame]:
    """One wide frame per quantity, one column per stack (empty where missing)."""
    frames: dict[str, pd.DataFrame] = {}
    jv = {
        f"J_mA_cm2[{label}]": pd.Series(curve.current, index=curve.voltage)
        for label, curve in result.curves.items()
    }
    frames["jv_compare.csv"] = _merge(jv, "V_volt")

    pv = {}
    for label, curve in result.curves.items():
        voltage, power = power_curve(curve, result.metrics.get(label))
        pv[f"P_mW_cm2[{label}]"] = pd.Series(power, index=voltage)
    frames["pv_compare.csv"] = _merge(pv, "V_volt")

    if result.qe:
        qe = {
            f"EQE[{label}]": pd.Series(curve.eqe, index=curve.wavelengths_nm)
            for label, curve in result.qe.items()
        }
        frames["qe_compare.csv"] = _merge(qe, "wavelength_nm")

    rows = []
    for label, metrics in result.metrics.items():
        record = metrics.to_record() if metrics else {key: None for key in METRIC_KEYS}
        rows.append({"stack": label, **record})
    frames["metrics_compare.csv"] = pd.DataFrame(rows, columns=["stack", *METRIC_KEYS])
    return frames


def write_comparison(result: Comparison, out_dir: str | Path) -> list[Path]:
    """Write every comparison frame into ``out_dir``."""
    out = Path(out_dir)
    return [write_frame(frame, out / name) for name, frame in comparison_frames(result).items()]


__all__ = ["Comparison", "compare_stacks", "comparison_frames", "write_comparison"]
