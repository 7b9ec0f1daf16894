"""Shared fixtures: a stand-in J-V evaluation so sweeps run without the solver."""

from __future__ import annotations

import math

import pytest

from sunstack import CellMetrics, DeviceStack, SolarSpectrum

# (thickness weight per µm, doping weight per decade) by layer label
SCORE_WEIGHTS = {
    "CIGS": (0.01, 0.001),
    "CdS": (-0.001, -0.001),
    "GaAs": (0.002, 0.001),
}


def score_stack(stack: DeviceStack) -> CellMetrics:
    """Synthetic metrics that favour thick, heavily doped absorbers and a thin, light CdS."""
    pce = 0.1
    for layer in stack.layers:
        thickness_weight, doping_weight = SCORE_WEIGHTS.get(layer.label, (0.0, 0.0))
        pce += thickness_weight * layer.thickness_um
        pce += doping_weight * math.log10(max(layer.doping_cm3, 1.0))
    jsc = 30.0 + 100.0 * pce
    return CellMetrics(
        jsc=jsc,
        voc=0.6,
        ff=pce * 100.0 / (0.6 * jsc),
        pce=pce,
        vmp=0.5,
        jmp=pce * 100.0 / 0.5,
        pmax=pce * 100.0,
        pin=100.0,
    )


@pytest.fixture
def line_spectrum() -> SolarSpectrum:
    return SolarSpectrum.monochromatic(500.0, 1e17)


@pytest.fixture
def fake_solver(monkeypatch):
    """Replace per-cell J-V evaluation with :func:`score_stack`; returns the evaluated stacks."""
    evaluated: list[DeviceStack] = []

    def fake_compute_jv(stack, cfg, spectrum):
        evaluated.append(stack)
        return stack

    monkeypatch.setattr("sunstack.sweep.compute_jv", fake_compute_jv)
    monkeypatch.setattr("sunstack.sweep.extract_metrics", score_stack)
    return evaluated
