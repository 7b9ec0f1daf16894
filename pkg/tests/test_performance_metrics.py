import pytest

from sunstack import HeatmapResult, PerformanceMetrics, SweepAxis, preset
from sunstack.sweep import run_grid_sweep


def test_timer_records_even_when_block_raises():
    timings = PerformanceMetrics()

    with timings.timer("jv", preset="pn-baseline"):
        pass
    with pytest.raises(RuntimeError):
        with timings.timer("jv"):
            raise RuntimeError("boom")

    summary = timings.get_summary()
    assert summary["jv"]["count"] == 2
    assert summary["jv"]["min"] <= summary["jv"]["avg"] <= summary["jv"]["max"]
    assert timings.metrics[0].metadata == {"preset": "pn-baseline"}

    timings.clear()
    assert timings.get_summary() == {}


def test_sweep_records_one_timing_per_cell(fake_solver, line_spectrum):
    timings = PerformanceMetrics()

    result = run_grid_sweep(
        preset("pn-baseline"),
        SweepAxis.parse("CdS.thickness_um=0.5:1.5:0.5"),
        SweepAxis.parse("CIGS.thickness_um=1:2:1"),
        spectrum=line_spectrum,
        jobs=1,
        timings=timings,
    )

    assert isinstance(result, HeatmapResult)
    summary = timings.get_summary()
    assert summary["sweep_cell"]["count"] == 6
    assert {(m.metadata["i"], m.metadata["j"]) for m in timings.metrics} == {
        (i, j) for i in range(3) for j in range(2)
    }
