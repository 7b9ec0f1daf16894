"""Tests for study definitions and chained sweeps."""

from __future__ import annotations

import json
import textwrap
from pathlib import Path

import pytest

from sunstack import (
    ConfigError,
    StudyConfig,
    StudyStep,
    load_device,
    load_study,
    reference_study,
    preset,
    run_study,
)
from sunstack.study import InsertLayer


def _write(path: Path, content: str) -> Path:
    path.write_text(textwrap.dedent(content))
    return path


def test_reference_study_steps():
    study = reference_study()

    assert [step.name for step in study.steps] == ["thickness", "doping", "gaas"]
    thickness, doping, gaas = (step.axes() for step in study.steps)
    assert len(thickness[0]) == len(thickness[1]) == 10
    assert len(doping[0]) == len(doping[1]) == 11
    assert gaas[0].name == "GaAs.thickness_um"
    assert len(gaas[1]) == 10
    assert study.steps[2].insert_layer.position == "back"


def test_step_rejects_malformed_axis():
    with pytest.raises(ValueError, match="expected LAYER.PARAM"):
        StudyStep(name="bad", axis1="CdS.thickness_um", axis2="CIGS.thickness_um=1:2:1")


def test_study_needs_unique_named_steps():
    step = StudyStep(name="a", axis1="CdS.thickness_um=1:2:1", axis2="CIGS.thickness_um=1:2:1")

    with pytest.raises(ValueError, match="duplicate step names: a"):
        StudyConfig(steps=(step, step))
    with pytest.raises(ValueError):
        StudyConfig(steps=())


def test_bundled_study_by_name():
    assert load_study("reference") == reference_study()


def test_load_study_from_yaml(tmp_path, monkeypatch):
    monkeypatch.setenv("BACK_DOPING", "1e12")
    path = _write(
        tmp_path / "study.yaml",
        """
        name: two-step
        steps:
          - name: thickness
            axis1: CdS.thickness_um=0.5:1.0:0.5
            axis2: CIGS.thickness_um=1:3:1
          - name: back layer
            insert_layer:
              material: p-GaAs
              thickness_um: 0.5
              doping_type: acceptor
              doping_cm3: ${env:BACK_DOPING}
            axis1: GaAs.thickness_um=0.5,1.0
            axis2: GaAs.doping_cm3=1e11:1e13
            metric: Voc
        """,
    )

    study = load_study(path)

    assert study.name == "two-step"
    assert study.steps[1].metric == "Voc"
    assert study.steps[1].insert_layer == InsertLayer(
        material="p-GaAs", thickness_um=0.5, doping_type="acceptor", doping_cm3=1e12
    )


def test_invalid_study_file_is_a_config_error(tmp_path):
    path = _write(
        tmp_path / "study.yaml",
        """
        steps:
          - name: thickness
            axis1: CdS.thickness_um=0.5:1.0:0.5
            axis2: CIGS.thickness_um=1:3:1
            metric: Rs
        """,
    )

    with pytest.raises(ConfigError) as exc:
        load_study(path)

    assert exc.value.field == "steps.0.metric"


def test_missing_study_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_study(tmp_path / "nope.yaml")


def test_reference_study_chains_best_cells(fake_solver, line_spectrum, tmp_path):
    result = run_study(
        preset("pn-baseline"), reference_study(), spectrum=line_spectrum, out_dir=tmp_path, jobs=1
    )

    final = result.final_stack
    assert final.labels == ["GaAs", "CIGS", "CdS", "ZnO"]
    gaas, cigs, cds, _ = final.layers
    assert (cds.thickness_um, cigs.thickness_um) == (0.5, 5.0)
    assert (cds.doping_cm3, cigs.doping_cm3) == (1e10, 1e20)
    assert (gaas.thickness_um, gaas.doping_cm3) == (5.0, 1e20)
    assert len(fake_solver) == 100 + 121 + 100

    assert sorted(p.name for p in tmp_path.iterdir()) == [
        "01-thickness",
        "02-doping",
        "03-gaas",
        "final_device.json",
        "study.json",
    ]
    assert (tmp_path / "03-gaas" / "pce.csv").exists()
    assert load_device(tmp_path / "02-doping" / "device.json").labels == ["CIGS", "CdS", "ZnO"]
    assert load_device(tmp_path / "final_device.json") == final

    summary = json.loads((tmp_path / "study.json").read_text())
    assert summary["study"] == "reference"
    first = summary["steps"][0]
    assert first["best"] == {"CdS.thickness_um": 0.5, "CIGS.thickness_um": 5.0}
    assert first["directory"] == "01-thickness"
    assert first["failed_cells"] == 0


def test_step_axis_must_match_current_stack(fake_solver, line_spectrum):
    study = StudyConfig(
        steps=(
            StudyStep(name="s", axis1="GaAs.thickness_um=1:2:1", axis2="CIGS.thickness_um=1:2:1"),
        )
    )

    with pytest.raises(ConfigError, match="GaAs"):
        run_study(preset("pn-baseline"), study, spectrum=line_spectrum, jobs=1)
