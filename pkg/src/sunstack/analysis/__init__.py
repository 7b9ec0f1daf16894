"""J-V/P-V curves, cell metrics, quantum efficiency, band diagrams and exports."""

from .bands import BAND_COLUMNS, band_diagram
from .compare import Comparison, compare_stacks, comparison_frames, write_comparison
from .curves import IVCurve, bias_grid, compute_jv, power_curve
from .export import (
    METRIC_KEYS,
    metrics_record,
    write_band_diagram_csv,
    write_curve_csv,
    write_json,
    write_metrics_json,
    write_power_csv,
    write_qe_csv,
    write_qe_failures,
)
from .metrics import CellMetrics, extract_metrics, pce_identity
from .qe import QECurve, compute_qe, wavelength_grid

__all__ = [
    "IVCurve",
    "CellMetrics",
    "QECurve",
    "Comparison",
    "bias_grid",
    "compute_jv",
    "power_curve",
    "extract_metrics",
    "pce_identity",
    "compute_qe",
    "wavelength_grid",
    "band_diagram",
    "BAND_COLUMNS",
    "compare_stacks",
    "comparison_frames",
    "write_comparison",
    "METRIC_KEYS",
    "metrics_record",
    "write_curve_csv",
    "write_power_csv",
    "write_qe_csv",
    "write_qe_failures",
    "write_band_diagram_csv",
    "write_json",
    "write_metrics_json",
]
