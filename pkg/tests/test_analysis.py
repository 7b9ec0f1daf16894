"""Tests for J-V metrics, P-V curves, QE containers, band diagrams and exports."""

from __future__ import annotations

import dataclasses
import json

import numpy as np
import pandas as pd
import pytest

from sunstack import (
    AnalysisError,
    CellMetrics,
    ConfigError,
    IVCurve,
    QECurve,
    SolarSpectrum,
    VocOutOfRangeError,
    band_diagram,
    build_stack,
    compute_qe,
    extract_metrics,
    generate_mesh,
    pce_identity,
    power_curve,
    preset,
    simulate,
    solve_equilibrium,
)
from sunstack.config import SimulationConfig
from sunstack.analysis import (
    Comparison,
    bias_grid,
    comparison_frames,
    wavelength_grid,
    write_comparison,
    write_curve_csv,
    write_metrics_json,
    write_power_csv,
    write_qe_csv,
)
from sunstack.analysis.export import write_qe_failures
from sunstack.constants import A_TO_MA, Q, thermal_voltage

VT = thermal_voltage(300.0)


def _diode_curve(jsc: float = 40.0, j0: float = 1e-8, v_max: float = 0.7, step: float = 0.001) -> IVCurve:
    voltage = np.round(np.arange(0.0, v_max + step / 2, step), 12)
    current = jsc - j0 * np.expm1(voltage / VT)
    return IVCurve(voltage, current, pin=100.0)


def test_ideal_diode_metrics_match_analytic_values():
    metrics = extract_metrics(_diode_curve())

    assert metrics.jsc == pytest.approx(40.0, rel=1e-9)
    assert metrics.voc == pytest.approx(VT * np.log(40.0 / 1e-8 + 1), abs=1e-4)
    assert metrics.ff == pytest.approx(0.82128, abs=1e-3)
    assert metrics.pmax == pytest.approx(18.777, abs=1e-2)
    assert metrics.vmp == pytest.approx(0.494, abs=2e-3)


def test_fill_factor_agrees_with_empirical_estimate():
    metrics = extract_metrics(_diode_curve())
    voc_n = metrics.voc / VT

    assert metrics.ff == pytest.approx((voc_n - np.log(voc_n + 0.72)) / (voc_n + 1), abs=1e-3)


def test_efficiency_identity_holds():
    metrics = extract_metrics(_diode_curve())

    assert metrics.pce == pytest.approx(
        pce_identity(metrics.voc, metrics.jsc, metrics.ff, metrics.pin), rel=1e-6
    )


def test_identity_on_reported_quadruple():
    pce = pce_identity(1.16, 43.88, 0.8952, 100.0)

    assert pce == pytest.approx(0.45566, abs=1e-5)
    assert abs(pce - 0.457) < 0.005
    assert abs(pce - 0.4547) < 0.005


def test_coarse_grid_never_underestimates_best_sample():
    curve = _diode_curve(step=0.02)

    metrics = extract_metrics(curve)

    assert metrics.pmax >= float(np.max(curve.voltage * curve.current))
    assert metrics.ff == pytest.approx(0.82128, abs=5e-3)


def test_no_zero_crossing_suggests_raising_vmax():
    with pytest.raises(VocOutOfRangeError) as exc:
        extract_metrics(_diode_curve(v_max=0.4))

    assert exc.value.v_max == pytest.approx(0.4)
    assert "raise the maximum bias" in str(exc.value)


def test_metrics_need_photocurrent_and_samples():
    with pytest.raises(AnalysisError, match="at least 3"):
        extract_metrics(IVCurve(np.array([0.0, 0.1]), np.array([1.0, -1.0]), pin=100.0))
    with pytest.raises(AnalysisError, match="No photocurrent"):
        extract_metrics(IVCurve(np.array([0.0, 0.1, 0.2]), np.array([-1.0, -2.0, -3.0]), pin=100.0))
    with pytest.raises(AnalysisError, match="Incident power"):
        extract_metrics(IVCurve(np.array([0.0, 0.1, 0.2]), np.array([1.0, 0.5, -1.0]), pin=0.0))


def test_curve_validation():
    with pytest.raises(AnalysisError):
        IVCurve(np.array([0.0, 0.0]), np.array([1.0, 1.0]), pin=100.0)
    with pytest.raises(AnalysisError):
        IVCurve(np.array([0.0, 0.1]), np.array([1.0]), pin=100.0)


def test_power_curve_peaks_at_pmax():
    curve = _diode_curve(step=0.02)
    metrics = extract_metrics(curve)

    voltage, power = power_curve(curve, metrics)

    assert power.max() == pytest.approx(metrics.pmax, rel=1e-12)
    assert np.all(np.diff(voltage) > 0)
    assert power_curve(curve)[1].size == len(curve)


def test_metric_lookup_and_report_form():
    metrics = extract_metrics(_diode_curve())

    assert metrics.value("Voc") == metrics.voc
    assert metrics.value("PCE") == metrics.pce
    record = metrics.to_record()
    assert record["PCE_percent"] == pytest.approx(metrics.pce * 100)
    assert record["FF_percent"] == pytest.approx(metrics.ff * 100)
    with pytest.raises(AnalysisError):
        metrics.value("Rs")


def test_bias_grid_sample_counts():
    assert len(bias_grid(1.3, 0.02)) == 66
    assert len(bias_grid(0.8, 0.02)) == 41
    assert bias_grid(1.3, 0.02)[-1] == pytest.approx(1.3)


def test_wavelength_grid_sample_counts():
    assert len(wavelength_grid(300, 1200, 10)) == 91
    assert len(wavelength_grid(300, 900, 10)) == 61
    with pytest.raises(ConfigError):
        wavelength_grid(300, 900, 0)
    with pytest.raises(ConfigError):
        wavelength_grid(900, 300, 10)


def test_qe_curve_rejects_out_of_range_values():
    with pytest.raises(AnalysisError):
        QECurve(np.array([500.0, 600.0]), np.array([0.5, 1.2]))

    gap = QECurve(np.array([500.0, 600.0]), np.array([0.5, np.nan]), [(600.0, "diverged")])
    assert len(gap) == 2


def test_qe_probe_collecting_more_than_incident_flux_is_a_failure(monkeypatch):
    cfg = SimulationConfig()
    incident = Q * cfg.qe.probe_flux * A_TO_MA
    ratios = iter([0.7, 1.3])

    def overcollecting(equilibrium, generation, solver_cfg):
        return dataclasses.replace(
            equilibrium, current=equilibrium.current - next(ratios) * incident
        )

    stack = preset("pn-baseline")
    monkeypatch.setattr("sunstack.analysis.qe.illuminate", overcollecting)

    qe = compute_qe(stack, [500.0, 600.0], cfg)

    assert qe.eqe[0] == pytest.approx(0.7, rel=1e-9)
    assert np.isnan(qe.eqe[1])
    assert qe.failures[0][0] == 600.0
    assert "exceeds the incident photon flux" in qe.failures[0][1]


def test_simulate_returns_dark_and_short_circuit_states():
    stack = build_stack([("p-CIGS", 1.0, "acceptor", 1e16), ("n-CdS", 0.1, "donor", 1e17)])
    spectrum = SolarSpectrum.monochromatic(700.0, 1e17)

    point = simulate(stack, spectrum=spectrum)

    assert point.equilibrium.current == pytest.approx(0.0, abs=1e-9)
    assert point.illuminated.current < 0
    assert point.jsc == pytest.approx(-point.illuminated.current, rel=1e-6)
    assert point.pin == pytest.approx(spectrum.total_power)
    dark = band_diagram(point.equilibrium)
    assert np.all(dark["EFn_eV"] == 0.0) and np.all(dark["EFp_eV"] == 0.0)
    lit = band_diagram(point.illuminated)
    assert np.allclose(lit["Ec_eV"] - lit["Ev_eV"], point.illuminated.bands.bandgap)


def test_band_diagram_columns_and_gap():
    stack = preset("pn-baseline")
    state = solve_equilibrium(stack, generate_mesh(stack))

    frame = band_diagram(state)

    assert list(frame.columns) == ["x_um", "Ec_eV", "Ev_eV", "EFn_eV", "EFp_eV"]
    assert len(frame) == state.mesh.n_nodes
    assert np.allclose(frame["Ec_eV"] - frame["Ev_eV"], state.bands.bandgap)
    assert frame["x_um"].iloc[-1] == pytest.approx(1.5)


def test_band_diagram_requires_converged_state():
    stack = preset("pn-baseline")
    state = solve_equilibrium(stack, generate_mesh(stack))

    with pytest.raises(AnalysisError):
        band_diagram(dataclasses.replace(state, converged=False))


def test_curve_and_metrics_files(tmp_path):
    curve = _diode_curve(step=0.02)
    metrics = extract_metrics(curve)

    write_curve_csv(curve, tmp_path / "jv.csv")
    write_power_csv(curve, tmp_path / "pv.csv", metrics)
    write_metrics_json(metrics, tmp_path / "metrics.json")

    jv = pd.read_csv(tmp_path / "jv.csv")
    assert list(jv.columns) == ["V_volt", "J_mA_cm2"]
    assert len(jv) == len(curve)
    assert pd.read_csv(tmp_path / "pv.csv")["P_mW_cm2"].max() == pytest.approx(metrics.pmax)
    record = json.loads((tmp_path / "metrics.json").read_text())
    assert record["PCE_percent"] == pytest.approx(
        record["Voc_V"] * record["Jsc_mA_cm2"] * record["FF_percent"] / record["Pin_mW_cm2"],
        rel=1e-6,
    )


def test_dark_metrics_are_null(tmp_path):
    write_metrics_json(None, tmp_path / "metrics.json", samples=66)

    record = json.loads((tmp_path / "metrics.json").read_text())

    assert record["Jsc_mA_cm2"] is None
    assert record["PCE_percent"] is None
    assert record["samples"] == 66


def test_exports_are_byte_identical(tmp_path):
    curve = _diode_curve(step=0.02)

    first = write_curve_csv(curve, tmp_path / "a.csv").read_bytes()
    second = write_curve_csv(curve, tmp_path / "b.csv").read_bytes()

    assert first == second


def test_qe_export_leaves_gaps(tmp_path):
    qe = QECurve(np.array([500.0, 600.0]), np.array([0.8, np.nan]), [(600.0, "diverged")])

    write_qe_csv(qe, tmp_path / "qe.csv")
    sidecar = write_qe_failures(qe, tmp_path / "qe_failures.log")

    lines = (tmp_path / "qe.csv").read_text().splitlines()
    assert lines == ["wavelength_nm,EQE", "500,0.8", "600,"]
    assert sidecar.read_text() == "600 nm: diverged\n"


def test_comparison_frames_have_one_column_per_stack(tmp_path):
    base = _diode_curve(step=0.02)
    better = IVCurve(base.voltage, base.current * 1.1, pin=100.0)
    result = Comparison(
        curves={"pn": base, "ppn": better},
        metrics={"pn": extract_metrics(base), "ppn": extract_metrics(better)},
        qe={
            "pn": QECurve(np.array([500.0, 600.0]), np.array([0.8, 0.7])),
            "ppn": QECurve(np.array([500.0, 600.0]), np.array([0.9, 0.85])),
        },
    )

    frames = comparison_frames(result)
    written = write_comparison(result, tmp_path)

    assert list(frames["jv_compare.csv"].columns) == ["V_volt", "J_mA_cm2[pn]", "J_mA_cm2[ppn]"]
    assert list(frames["qe_compare.csv"].columns) == ["wavelength_nm", "EQE[pn]", "EQE[ppn]"]
    assert frames["metrics_compare.csv"]["stack"].tolist() == ["pn", "ppn"]
    assert sorted(p.name for p in written) == [
        "jv_compare.csv",
        "metrics_compare.csv",
        "pv_compare.csv",
        "qe_compare.csv",
    ]
