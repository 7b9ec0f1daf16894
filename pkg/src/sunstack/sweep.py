"""Two-parameter grid sweeps and heatmap output.

Axes are written ``LAYER.PARAM=start:stop:step`` (linear),
``LAYER.PARAM=1eA:1eB`` (one point per decade) or ``LAYER.PARAM=v1,v2,...``.
``LAYER`` is a layer label (``CIGS``, ``CdS``, ``ZnO``, ``GaAs`` or a custom
layer name) and ``PARAM`` is ``thickness_um`` or ``doping_cm3``.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, field_validator

from sunstack.analysis.curves import compute_jv
from sunstack.analysis.export import write_json
from sunstack.analysis.metrics import CellMetrics, extract_metrics
from sunstack.config.models import Metric, SimulationConfig
from sunstack.config.validators import log_debug, log_info, log_warning
from sunstack.device.stack import SWEEPABLE_PARAMETERS, DeviceStack, LayerParameter
from sunstack.errors import AxisError, DeviceError, SunstackError, SweepError
from sunstack.optics.spectrum import SolarSpectrum, am15g
from sunstack.performance import PerformanceMetrics

METRICS: tuple[Metric, ...] = ("PCE", "FF", "Jsc", "Voc")
HEATMAP_FLOAT_FORMAT = "%.6g"


class SweepAxis(BaseModel):
    """One swept (layer, parameter) pair and its strictly increasing values."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    layer: str
    parameter: LayerParameter
    values: tuple[float, ...]

    @field_validator("values")
    @classmethod
    def _check_values(cls, values: tuple[float, ...]) -> tuple[float, ...]:
        if len(values) < 2:
            raise ValueError("a sweep axis needs at least 2 values")
        if any(not math.isfinite(v) or v <= 0 for v in values):
            raise ValueError("sweep values must be positive and finite")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("sweep values must be strictly increasing")
        return values

    @property
    def name(self) -> str:
        return f"{self.layer}.{self.parameter}"

    def __len__(self) -> int:
        return len(self.values)

    @classmethod
    def linear(
        cls, layer: str, parameter: str, start: float, stop: float, step: float
    ) -> "SweepAxis":
        """start, start+step, … up to stop inclusive."""
        if step <= 0:
            raise AxisError(f"{layer}.{parameter}: step must be positive", field=parameter)
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        values = tuple(round(start + k * step, 12) for k in range(count))
        return cls._build(layer, parameter, values)

    @classmethod
    def decades(cls, layer: str, parameter: str, first: int, last: int) -> "SweepAxis":
        """10^first, 10^(first+1), …, 10^last."""
        return cls._build(
            layer, parameter, tuple(float(f"1e{k}") for k in range(first, last + 1))
        )

    @classmethod
    def _build(cls, layer: str, parameter: str, values: tuple[float, ...]) -> "SweepAxis":
        if parameter not in SWEEPABLE_PARAMETERS:
            raise AxisError(
                f"Unknown parameter '{parameter}' for layer {layer} "
                f"(expected one of {', '.join(SWEEPABLE_PARAMETERS)})",
                field=parameter,
            )
        try:
            return cls(layer=layer, parameter=parameter, values=values)  # type: ignore[arg-type]
        except ValueError as exc:
            raise AxisError(f"{layer}.{parameter}: {exc}", field=parameter, cause=exc) from exc

    @classmethod
    def parse(cls, text: str) -> "SweepAxis":
        """Parse the ``LAYER.PARAM=...`` axis syntax.

        Raises:
            AxisError: On malformed syntax, unknown parameter or bad values.
        """
        target, sep, spec = text.partition("=")
        layer, dot, parameter = target.strip().partition(".")
        if not sep or not dot or not layer or not spec.strip():
            raise AxisError(
                f"Invalid axis '{text}': expected LAYER.PARAM=start:stop:step or LAYER.PARAM=1eA:1eB"
            )
        parameter = parameter.strip()
        parts = [part.strip() for part in spec.split(":")]
        try:
            if "," in spec:
                values = tuple(float(part) for part in spec.split(","))
                return cls._build(layer, parameter, values)
            numbers = [float(part) for part in parts]
        except ValueError as exc:
            raise AxisError(f"Invalid axis '{text}': values must be numbers", cause=exc) from exc

        if len(numbers) == 3:
            return cls.linear(layer, parameter, *numbers)
        if len(numbers) == 2:
            exponents = []
            for number in numbers:
                exponent = math.log10(number) if number > 0 else math.nan
                if not math.isfinite(exponent) or abs(exponent - round(exponent)) > 1e-9:
                    raise AxisError(
                        f"Invalid axis '{text}': decade sweeps need powers of ten like 1e10:1e20"
                    )
                exponents.append(int(round(exponent)))
            return cls.decades(layer, parameter, exponents[0], exponents[1])
        raise AxisError(
            f"Invalid axis '{text}': expected start:stop:step, 1eA:1eB or a comma list"
        )


@dataclass
class HeatmapResult:
    """Metrics on an |axis1| × |axis2| grid; ``None`` cells failed."""

    axis1: SweepAxis
    axis2: SweepAxis
    cells: list[list[Optional[CellMetrics]]]
    failures: list[tuple[int, int, str]] = field(default_factory=list)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.axis1), len(self.axis2)

    @property
    def succeeded(self) -> int:
        return sum(cell is not None for row in self.cells for cell in row)

    def metric_matrix(self, metric: str) -> np.ndarray:
        """Report-unit matrix (PCE/FF in %), NaN where a cell failed."""
        scale = 100.0 if metric in ("PCE", "FF") else 1.0
        matrix = np.full(self.shape, np.nan)
        for i, row in enumerate(self.cells):
            for j, cell in enumerate(row):
                if cell is not None:
                    matrix[i, j] = cell.value(metric) * scale
        return matrix


def _resolve_axis(template: DeviceStack, axis: SweepAxis) -> int:
    try:
        return template.layer_index(axis.layer)
    except DeviceError as exc:
        raise AxisError(f"Axis {axis.name}: {exc}", field=axis.layer, cause=exc) from exc


def _evaluate_cell(
    template: DeviceStack,
    target1: tuple[int, str, float],
    target2: tuple[int, str, float],
    cfg: SimulationConfig,
    spectrum: SolarSpectrum,
) -> tuple[Optional[CellMetrics], Optional[str], float]:
    start = time.perf_counter()
    try:
        stack = template.with_parameter(*target1).with_parameter(*target2)
        metrics = extract_metrics(compute_jv(stack, cfg, spectrum))
    except (SunstackError, ValueError, ArithmeticError) as exc:
        return None, f"{type(exc).__name__}: {exc}", time.perf_counter() - start
    return metrics, None, time.perf_counter() - start


def resolve_jobs(jobs: Optional[int]) -> int:
    """Worker count: explicit value, else every available core."""
    if jobs is not None:
        if jobs < 1:
            raise SweepError(f"jobs must be >= 1, got {jobs}")
        return jobs
    return os.cpu_count() or 1


def run_grid_sweep(
    template: DeviceStack,
    axis1: SweepAxis,
    axis2: SweepAxis,
    cfg: Optional[SimulationConfig] = None,
    spectrum: Optional[SolarSpectrum] = None,
    *,
    jobs: Optional[int] = None,
    timings: Optional[PerformanceMetrics] = None,
) -> HeatmapResult:
    """Evaluate J-V metrics on every (axis1, axis2) grid cell.

    Cells run in a process pool when more than one job is requested; results
    are placed by grid index so output never depends on completion order.
    Cell failures are recorded in ``failures`` and do not stop the sweep.

    Raises:
        AxisError: Unknown layer, or both axes on the same (layer, parameter).
    """
    cfg = cfg or SimulationConfig()
    spectrum = spectrum if spectrum is not None else am15g()
    index1 = _resolve_axis(template, axis1)
    index2 = _resolve_axis(template, axis2)
    if (index1, axis1.parameter) == (index2, axis2.parameter):
        raise AxisError(f"Both axes target {axis1.name}; sweep two different parameters")

    cell_cfg = cfg.with_updates(jv={"points_past_voc": cfg.sweep.points_past_voc})
    workers = resolve_jobs(jobs if jobs is not None else cfg.sweep.jobs)
    owns_timings = timings is None
    timings = timings if timings is not None else PerformanceMetrics()
    grid = [
        (i, j, (index1, axis1.parameter, v1), (index2, axis2.parameter, v2))
        for i, v1 in enumerate(axis1.values)
        for j, v2 in enumerate(axis2.values)
    ]
    log_info(
        "Starting grid sweep",
        axis1=axis1.name,
        axis2=axis2.name,
        cells=len(grid),
        jobs=workers,
    )

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            futures = [
                executor.submit(_evaluate_cell, template, t1, t2, cell_cfg, spectrum)
                for _, _, t1, t2 in grid
            ]
            outcomes = [future.result() for future in futures]
    else:
        outcomes = [_evaluate_cell(template, t1, t2, cell_cfg, spectrum) for _, _, t1, t2 in grid]

    cells: list[list[Optional[CellMetrics]]] = [[None] * len(axis2) for _ in axis1.values]
    failures: list[tuple[int, int, str]] = []
    for (i, j, _, _), (metrics, error, duration) in zip(grid, outcomes):
        timings.record("sweep_cell", duration, i=i, j=j)
        if error is not None:
            log_warning("Sweep cell failed", i=i, j=j, error=error)
            failures.append((i, j, error))
        else:
            cells[i][j] = metrics
            log_debug("Sweep cell done", i=i, j=j, pce=metrics.pce)

    result = HeatmapResult(axis1, axis2, cells, failures)
    log_info("Grid sweep complete", succeeded=result.succeeded, failed=len(failures))
    if owns_timings:
        timings.log_summary("Sweep timing")
    return result


def best_index(result: HeatmapResult, metric: str = "PCE") -> tuple[int, int]:
    """(i, j) of the best successful cell; ties go to the smaller axis1 then axis2 value.

    Raises:
        SweepError: When every cell failed.
    """
    best: Optional[tuple[int, int]] = None
    best_value = -math.inf
    for i, row in enumerate(result.cells):
        for j, cell in enumerate(row):
            if cell is None:
                continue
            value = cell.value(metric)
            if value > best_value:
                best, best_value = (i, j), value
    if best is None:
        raise SweepError(f"All {result.shape[0] * result.shape[1]} sweep cells failed")
    return best


def best_cell(result: HeatmapResult, metric: str = "PCE") -> tuple[float, float, CellMetrics]:
    """Axis values and metrics of the best cell for ``metric``."""
    i, j = best_index(result, metric)
    metrics = result.cells[i][j]
    assert metrics is not None
    return result.axis1.values[i], result.axis2.values[j], metrics


def heatmap_frame(result: HeatmapResult, metric: str) -> pd.DataFrame:
    """Grid with axis2 values as header and axis1 values as first column."""
    frame = pd.DataFrame(
        result.metric_matrix(metric),
        columns=[format(v, ".10g") for v in result.axis2.values],
    )
    frame.insert(
        0,
        f"{result.axis1.name}/{result.axis2.name}",
        [format(v, ".10g") for v in result.axis1.values],
    )
    return frame


def write_heatmaps(
    result: HeatmapResult, out_dir: str | Path, metric: str = "PCE"
) -> list[Path]:
    """Write pce/ff/jsc/voc CSVs, ``failures.csv`` and ``best.json``.

    Raises:
        SweepError: If no cell succeeded (the CSVs are still written).
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name in METRICS:
        target = out / f"{name.lower()}.csv"
        heatmap_frame(result, name).to_csv(
            target, index=False, float_format=HEATMAP_FLOAT_FORMAT, na_rep="", lineterminator="\n"
        )
        written.append(target)

    failures = pd.DataFrame(
        [
            (i, j, result.axis1.values[i], result.axis2.values[j], error)
            for i, j, error in result.failures
        ],
        columns=["i", "j", result.axis1.name, result.axis2.name, "error"],
    )
    target = out / "failures.csv"
    failures.to_csv(target, index=False, float_format="%.10g", lineterminator="\n")
    written.append(target)

    summary: dict = {"selected_metric": metric, "axis1": result.axis1.name, "axis2": result.axis2.name}
    for name in METRICS:
        i, j = best_index(result, name)
        cell = result.cells[i][j]
        summary[name] = {
            "i": i,
            "j": j,
            result.axis1.name: result.axis1.values[i],
            result.axis2.name: result.axis2.values[j],
            "metrics": cell.to_record() if cell else None,
        }
    written.append(write_json(summary, out / "best.json"))
    return written


__all__ = [
    "METRICS",
    "SweepAxis",
    "HeatmapResult",
    "run_grid_sweep",
    "best_index",
    "best_cell",
    "heatmap_frame",
    "write_heatmaps",
    "resolve_jobs",
]
