"""Full-size runs against analytic oracles and the reference optimization trends.

Deselected by default; run with ``pytest -m slow``.
"""

from __future__ import annotations

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from sunstack import (
    SweepAxis,
    am15g,
    build_stack,
    compute_qe,
    continuation_sweep,
    generate_mesh,
    max_photocurrent,
    pce_identity,
    preset,
    run_grid_sweep,
    run_study,
    simulate_jv,
)
from sunstack.config import SimulationConfig
from sunstack.constants import thermal_voltage
from sunstack.device import PRESET_NAMES
from sunstack.study import StudyConfig, reference_study
from sunstack.sweep import best_cell, write_heatmaps

pytestmark = pytest.mark.slow


def _homojunction():
    return build_stack(
        [
            ("p-CIGS", 1.0, "acceptor", 1e16, "p-side"),
            ("p-CIGS", 1.0, "donor", 1e16, "n-side"),
        ]
    )


def _pce(name: str) -> float:
    _, metrics = simulate_jv(preset(name), SimulationConfig(), am15g())
    return metrics.pce


def _fit_shockley(voltages, current):
    """Least-squares fit of J = J0·(exp(V/nVt) − 1) on J itself.

    For a fixed ideality the best J0 is linear; the ideality is then found by a
    bounded scalar search. Returns ``(n, J0, R²)``.
    """
    vt = thermal_voltage(300.0)

    def saturation(n):
        shape = np.expm1(voltages / (n * vt))
        return float(shape @ current / (shape @ shape)), shape

    def sse(n):
        j0, shape = saturation(n)
        return float(np.sum((current - j0 * shape) ** 2))

    ideality = minimize_scalar(sse, bounds=(0.5, 4.0), method="bounded", options={"xatol": 1e-8}).x
    j0, _ = saturation(ideality)
    r_squared = 1 - sse(ideality) / float(np.sum((current - current.mean()) ** 2))
    return ideality, j0, r_squared


def test_dark_homojunction_follows_diode_law():
    stack = _homojunction()
    voltages = np.round(np.arange(0.1, 0.401, 0.02), 12)

    states = continuation_sweep(stack, generate_mesh(stack), list(voltages))
    current = np.array([s.current for s in states])

    assert np.all(np.diff(current) > 0)
    ideality, saturation, r_squared = _fit_shockley(voltages, current)
    assert saturation > 0
    assert r_squared > 0.999
    assert 1.0 <= ideality <= 2.0


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_presets_respect_flux_bound_and_efficiency_identity(name):
    stack = preset(name)
    spectrum = am15g()

    _, metrics = simulate_jv(stack, SimulationConfig(), spectrum)

    assert 0 < metrics.jsc <= max_photocurrent(stack, spectrum)
    assert metrics.pce == pytest.approx(
        pce_identity(metrics.voc, metrics.jsc, metrics.ff, metrics.pin), rel=1e-6
    )


def test_gaas_back_layer_beats_plain_absorber():
    assert _pce("ppn-optimized") > _pce("pn-optimized")


def test_thicker_absorber_does_not_lose_efficiency():
    cfg = SimulationConfig()
    spectrum = am15g()
    pces = [
        simulate_jv(preset("pn-baseline").with_parameter("CIGS", "thickness_um", t), cfg, spectrum)[1].pce
        for t in (0.5, 2.0, 3.5, 5.0)
    ]

    assert all(later >= earlier - 0.1 for earlier, later in zip(pces, pces[1:]))


def test_thickness_step_prefers_thickest_absorber():
    thickness = reference_study().steps[0]

    result = run_grid_sweep(preset("pn-baseline"), *thickness.axes())

    _, cigs_um, _ = best_cell(result)
    assert cigs_um == 5.0


def test_gaas_step_prefers_thick_heavily_doped_corner():
    study = StudyConfig(name="gaas", steps=(reference_study().steps[2],))

    result = run_study(preset("pn-doping-optimized"), study)

    gaas = result.final_stack.layers[0]
    assert result.final_stack.labels[0] == "GaAs"
    assert (gaas.thickness_um, gaas.doping_cm3) == (5.0, 1e20)


def test_qe_bounds_and_thick_absorber_response():
    stack = preset("ppn-optimized")

    qe = compute_qe(stack, [500.0, 800.0, 1020.0, 1200.0], jobs=2)

    assert not qe.failures
    assert np.all((qe.eqe >= 0) & (qe.eqe <= 1))
    assert qe.eqe[2] > 0.9
    assert qe.eqe[3] == pytest.approx(0.0, abs=1e-6)


def test_sweep_output_does_not_depend_on_worker_count(tmp_path):
    axis1 = SweepAxis.parse("CdS.thickness_um=0.5:1.5:0.5")
    axis2 = SweepAxis.parse("CIGS.thickness_um=0.5:1.5:0.5")

    serial = write_heatmaps(run_grid_sweep(preset("pn-baseline"), axis1, axis2, jobs=1), tmp_path / "serial")
    parallel = write_heatmaps(run_grid_sweep(preset("pn-baseline"), axis1, axis2, jobs=3), tmp_path / "parallel")

    for a, b in zip(serial, parallel):
        assert a.read_bytes() == b.read_bytes()
