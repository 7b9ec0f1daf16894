"""Multi-step optimization studies.

A study chains grid sweeps: each step sweeps two parameters of the current
stack, and the best cell (by the step's metric) becomes the stack for the
next step. A step may first add a layer at the back or front contact.

Study files are YAML or JSON::

    name: my-study
    steps:
      - name: thickness
        axis1: CdS.thickness_um=0.5:5.0:0.5
        axis2: CIGS.thickness_um=0.5:5.0:0.5
      - name: back-layer
        insert_layer:
          material: p-GaAs
          thickness_um: 0.5
          doping_type: acceptor
          doping_cm3: 1e10
          position: back
        axis1: GaAs.thickness_um=0.5:5.0:0.5
        axis2: GaAs.doping_cm3=1e11:1e20
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from sunstack.analysis.export import write_json
from sunstack.analysis.metrics import CellMetrics
from sunstack.config.loading import first_error_field, format_validation_error, read_document
from sunstack.config.models import Metric, SimulationConfig
from sunstack.config.validators import log_info
from sunstack.device.io import save_device
from sunstack.device.stack import DeviceStack, make_layer
from sunstack.errors import AxisError, ConfigError
from sunstack.optics.spectrum import SolarSpectrum
from sunstack.performance import PerformanceMetrics
from sunstack.sweep import HeatmapResult, SweepAxis, best_index, run_grid_sweep, write_heatmaps


class InsertLayer(BaseModel):
    """A layer added to the stack before a step's sweep."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    material: str
    thickness_um: float = Field(gt=0)
    doping_type: Literal["donor", "acceptor"]
    doping_cm3: float = Field(ge=0)
    name: Optional[str] = None
    position: Literal["back", "front"] = "back"


class StudyStep(BaseModel):
    """One sweep of a study; axes use the sweep axis syntax."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    name: str = Field(min_length=1)
    axis1: str
    axis2: str
    metric: Metric = "PCE"
    insert_layer: Optional[InsertLayer] = None

    @model_validator(mode="after")
    def _check_axes(self) -> "StudyStep":
        for text in (self.axis1, self.axis2):
            try:
                SweepAxis.parse(text)
            except AxisError as exc:
                raise ValueError(str(exc)) from exc
        return self

    def axes(self) -> tuple[SweepAxis, SweepAxis]:
        return SweepAxis.parse(self.axis1), SweepAxis.parse(self.axis2)


class StudyConfig(BaseModel):
    """Ordered study steps."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    name: str = "study"
    steps: tuple[StudyStep, ...] = Field(min_length=1)

    @model_validator(mode="after")
    def _unique_step_names(self) -> "StudyConfig":
        names = [step.name for step in self.steps]
        duplicates = sorted({name for name in names if names.count(name) > 1})
        if duplicates:
            raise ValueError(f"duplicate step names: {', '.join(duplicates)}")
        return self


@dataclass
class StepOutcome:
    """Sweep result of one step and the stack it selected."""

    step: StudyStep
    result: HeatmapResult
    best: tuple[int, int]
    metrics: CellMetrics
    stack: DeviceStack
    directory: Path

    def record(self) -> dict:
        i, j = self.best
        return {
            "name": self.step.name,
            "metric": self.step.metric,
            "axis1": self.result.axis1.name,
            "axis2": self.result.axis2.name,
            "best": {
                self.result.axis1.name: self.result.axis1.values[i],
                self.result.axis2.name: self.result.axis2.values[j],
            },
            "metrics": self.metrics.to_record(),
            "failed_cells": len(self.result.failures),
            "directory": self.directory.name,
        }


@dataclass
class StudyResult:
    name: str
    steps: list[StepOutcome]

    @property
    def final_stack(self) -> DeviceStack:
        return self.steps[-1].stack


def reference_study() -> StudyConfig:
    """Thickness, then doping, then a p-GaAs back layer on the CIGS/CdS/ZnO stack."""
    return StudyConfig(
        name="reference",
        steps=(
            StudyStep(
                name="thickness",
                axis1="CdS.thickness_um=0.5:5.0:0.5",
                axis2="CIGS.thickness_um=0.5:5.0:0.5",
            ),
            StudyStep(
                name="doping",
                axis1="CdS.doping_cm3=1e10:1e20",
                axis2="CIGS.doping_cm3=1e10:1e20",
            ),
            StudyStep(
                name="gaas",
                insert_layer=InsertLayer(
                    material="p-GaAs",
                    thickness_um=0.5,
                    doping_type="acceptor",
                    doping_cm3=1e10,
                    position="back",
                ),
                axis1="GaAs.thickness_um=0.5:5.0:0.5",
                axis2="GaAs.doping_cm3=1e11:1e20",
            ),
        ),
    )


BUNDLED_STUDIES = {"reference": reference_study}


def load_study(path: str | Path) -> StudyConfig:
    """Read a study file, or return a bundled study when ``path`` names one.

    Raises:
        ConfigError: Unreadable or invalid study file.
    """
    if str(path) in BUNDLED_STUDIES:
        return BUNDLED_STUDIES[str(path)]()
    data = read_document(path)
    try:
        return StudyConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(
            format_validation_error(exc, str(path)),
            field=first_error_field(exc),
            cause=exc,
        ) from exc


def _step_dirname(index: int, name: str) -> str:
    slug = re.sub(r"[^A-Za-z0-9_-]+", "-", name).strip("-") or "step"
    return f"{index:02d}-{slug}"


def _insert(stack: DeviceStack, insert: InsertLayer, step_index: int) -> DeviceStack:
    layer = make_layer(
        step_index,
        insert.material,
        insert.thickness_um,
        insert.doping_type,
        insert.doping_cm3,
        insert.name,
    )
    return stack.with_layer(layer, insert.position)


def run_study(
    template: DeviceStack,
    study: StudyConfig,
    cfg: Optional[SimulationConfig] = None,
    spectrum: Optional[SolarSpectrum] = None,
    out_dir: Optional[str | Path] = None,
    *,
    jobs: Optional[int] = None,
) -> StudyResult:
    """Run every step, feeding each step's best stack into the next.

    With ``out_dir`` each step writes its heatmaps and selected device to
    ``NN-<step>/``, and ``study.json`` summarises the run.

    Raises:
        AxisError: A step's axis does not match the current stack.
        SweepError: Every cell of a step failed.
    """
    cfg = cfg or SimulationConfig()
    out = Path(out_dir) if out_dir is not None else None
    timings = PerformanceMetrics()
    stack = template
    outcomes: list[StepOutcome] = []

    for index, step in enumerate(study.steps, start=1):
        if step.insert_layer is not None:
            stack = _insert(stack, step.insert_layer, index)
        axis1, axis2 = step.axes()
        log_info("Study step", study=study.name, step=step.name, layers=stack.labels)
        with timings.timer("study_step", step=step.name):
            result = run_grid_sweep(
                stack, axis1, axis2, cfg, spectrum, jobs=jobs, timings=timings
            )
        i, j = best_index(result, step.metric)
        metrics = result.cells[i][j]
        assert metrics is not None
        stack = stack.with_parameter(axis1.layer, axis1.parameter, axis1.values[i])
        stack = stack.with_parameter(axis2.layer, axis2.parameter, axis2.values[j])

        directory = Path(_step_dirname(index, step.name))
        if out is not None:
            directory = out / directory
            write_heatmaps(result, directory, step.metric)
            save_device(stack, directory / "device.json")
        outcomes.append(StepOutcome(step, result, (i, j), metrics, stack, directory))
        log_info(
            "Study step selected",
            step=step.name,
            metric=step.metric,
            value=metrics.value(step.metric),
            **{axis1.name: axis1.values[i], axis2.name: axis2.values[j]},
        )

    outcome = StudyResult(study.name, outcomes)
    if out is not None:
        save_device(outcome.final_stack, out / "final_device.json")
        write_json(
            {"study": study.name, "steps": [o.record() for o in outcomes]},
            out / "study.json",
        )
    timings.log_summary("Study timing")
    return outcome


__all__ = [
    "InsertLayer",
    "StudyStep",
    "StudyConfig",
    "StepOutcome",
    "StudyResult",
    "BUNDLED_STUDIES",
    "reference_study",
    "load_study",
    "run_study",
]
