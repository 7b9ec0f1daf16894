"""Typer-based CLI for sunstack."""

from __future__ import annotations

# mypy: disable-error-code=assignment
import sys
from contextlib import contextmanager
from dataclasses import dataclass
from importlib.metadata import PackageNotFoundError
from importlib.metadata import version as pkg_version
from pathlib import Path
from typing import Iterator, Optional

import typer
from dotenv import find_dotenv, load_dotenv
from loguru import logger
from pydantic import ValidationError

from .analysis.compare import compare_stacks, write_comparison
from .analysis.export import (
    write_band_diagram_csv,
    write_curve_csv,
    write_json,
    write_metrics_json,
    write_power_csv,
    write_qe_csv,
    write_qe_failures,
)
from .analysis.qe import compute_qe, wavelength_grid
from .cli_display import _display_metrics, _display_stack, _display_table, _fail
from .config import format_validation_error, load_simulation_config, log_error, log_info
from .config.models import SimulationConfig
from .device.io import dump_device, load_device
from .device.presets import PRESET_NAMES, preset
from .device.stack import DeviceStack
from .errors import (
    AnalysisError,
    ConfigError,
    ConvergenceError,
    MeshError,
    SolverError,
    SweepError,
)
from .optics.spectrum import SolarSpectrum, load_spectrum
from .python_api import resolve_stack, simulate, simulate_jv
from .study import load_study, run_study
from .sweep import SweepAxis, best_cell, resolve_jobs, run_grid_sweep, write_heatmaps

load_dotenv(find_dotenv(usecwd=True), override=False)

app = typer.Typer(help="sunstack: drift-diffusion simulation and grid-sweep optimization of thin-film solar cells.")

DEFAULT_COMPARE = "pn-baseline,pn-optimized,ppn-optimized"


def _configure_logging(verbose: bool) -> None:
    """Send loguru output to stderr at INFO (verbose) or WARNING."""
    logger.remove()
    level = "INFO" if verbose else "WARNING"
    logger.add(
        sys.stderr,
        level=level,
        format="<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | {message}",
    )


@dataclass
class RunConfig:
    """Global options shared by every command."""

    device: Optional[Path] = None
    preset: Optional[str] = None
    spectrum: Optional[Path] = None
    out: Path = Path("results")
    jobs: Optional[int] = None
    temperature: Optional[float] = None
    config: Optional[Path] = None
    verbose: bool = False

    def stack(self, default_preset: Optional[str] = None) -> DeviceStack:
        if self.device is None and self.preset is None and default_preset is not None:
            return resolve_stack(preset=default_preset, temperature=self.temperature)
        return resolve_stack(self.device, self.preset, self.temperature)

    def load_spectrum(self) -> SolarSpectrum:
        return load_spectrum(self.spectrum)

    def simulation_config(self, **sections: dict) -> SimulationConfig:
        """Config file (or defaults) with the command flags that were given applied on top."""
        cfg = load_simulation_config(self.config) if self.config else SimulationConfig()
        given = {
            section: {key: value for key, value in values.items() if value is not None}
            for section, values in sections.items()
        }
        try:
            return cfg.with_updates(**given)
        except ValidationError as exc:
            raise ConfigError(format_validation_error(exc, "command-line flags"), cause=exc) from exc

    def out_dir(self) -> Path:
        try:
            self.out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ConfigError(f"Cannot create output directory {self.out}: {exc}", cause=exc) from exc
        return self.out


def _run(ctx: typer.Context) -> RunConfig:
    return ctx.obj if isinstance(ctx.obj, RunConfig) else RunConfig()


@contextmanager
def _reporting_errors(run: RunConfig, command: str) -> Iterator[None]:
    """Map sunstack errors onto exit codes: 2 config, 3 solver/analysis, 1 unexpected."""
    try:
        yield
    except typer.Exit:
        raise
    except ConfigError as exc:
        message = str(exc)
        if exc.field and exc.field not in message:
            message = f"{message} (field: {exc.field})"
        log_error(f"{command} failed due to config error", error=message, field=exc.field)
        _fail(f"Config error: {message}", 2)
    except ConvergenceError as exc:
        trace = ", ".join(f"{r:.3g}" for r in exc.residual_history[-5:])
        log_error(f"{command} failed to converge", error=str(exc), bias=exc.bias)
        _fail(f"Solver error: {exc} (last residuals: {trace or 'none'})", 3)
    except (SolverError, MeshError, AnalysisError, SweepError) as exc:
        log_error(f"{command} failed", error=str(exc))
        _fail(f"{type(exc).__name__}: {exc}", 3)
    except Exception as exc:
        if run.verbose:
            raise
        _fail(f"Unexpected error: {exc}", 1)


@app.callback()
def main_callback(
    ctx: typer.Context,
    device: Optional[Path] = typer.Option(
        None, "--device", "-d", help="Device file (JSON or YAML)."
    ),
    preset_name: Optional[str] = typer.Option(
        None, "--preset", "-p", help=f"Bundled stack: {', '.join(PRESET_NAMES)}."
    ),
    spectrum: Optional[Path] = typer.Option(
        None, "--spectrum", help="Two-column spectrum file (nm, W/m²/nm). Defaults to AM1.5G."
    ),
    out: Path = typer.Option(
        Path("results"), "--out", "-o", envvar="SUNSTACK_OUT", help="Output directory."
    ),
    jobs: Optional[int] = typer.Option(
        None, "--jobs", "-j", min=1, envvar="SUNSTACK_JOBS", help="Worker processes (default: all cores)."
    ),
    temp_k: Optional[float] = typer.Option(
        None, "--temp-K", envvar="SUNSTACK_TEMP_K", help="Device temperature in K (default 300)."
    ),
    config: Optional[Path] = typer.Option(
        None, "--config", "-c", help="Simulation settings file (YAML or JSON)."
    ),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Enable verbose logging output."),
) -> None:
    """Store global options in ``ctx.obj`` for the commands."""
    if ctx.resilient_parsing:
        return
    _configure_logging(verbose)
    ctx.obj = RunConfig(
        device=device,
        preset=preset_name,
        spectrum=spectrum,
        out=out,
        jobs=jobs,
        temperature=temp_k,
        config=config,
        verbose=verbose,
    )


@app.command(name="version", help="Show sunstack version.")
def version_command() -> None:
    """Show the installed sunstack package version."""
    try:
        current_version = pkg_version("sunstack")
    except PackageNotFoundError:
        current_version = "unknown"
    typer.echo(f"sunstack {current_version}")


@app.command(name="simulate", help="Solve equilibrium and the illuminated 0 V point; write the band diagram.")
def simulate_command(ctx: typer.Context) -> None:
    run = _run(ctx)
    with _reporting_errors(run, "simulate"):
        stack = run.stack()
        cfg = run.simulation_config()
        spectrum = run.load_spectrum()
        out = run.out_dir()
        log_info("CLI simulate invoked", layers=stack.labels, out=str(out))
        point = simulate(stack, cfg, spectrum)
        write_band_diagram_csv(point.illuminated, out / "band_diagram.csv")
        write_json(
            {
                "Jsc_mA_cm2": point.jsc,
                "Pin_mW_cm2": point.pin,
                "temperature_K": stack.temperature,
                "layers": stack.labels,
            },
            out / "metrics.json",
        )
    _display_stack(stack)
    typer.echo(f"Jsc = {point.jsc:.3f} mA/cm² at 0 V")
    typer.echo(f"Wrote {out / 'band_diagram.csv'} and {out / 'metrics.json'}")


@app.command(help="Sweep the J-V curve and extract Voc, Jsc, FF and PCE.")
def jv(
    ctx: typer.Context,
    vmax: Optional[float] = typer.Option(None, "--vmax", help="Maximum forward bias in V (default 1.3)."),
    vstep: Optional[float] = typer.Option(None, "--vstep", help="Bias increment in V (default 0.02)."),
    dark: bool = typer.Option(False, "--dark", help="Sweep without illumination."),
    points_past_voc: Optional[int] = typer.Option(
        None, "--points-past-voc", min=1, help="Stop this many samples after the current changes sign."
    ),
) -> None:
    """Write ``jv.csv``, ``pv.csv`` and ``metrics.json``."""
    run = _run(ctx)
    with _reporting_errors(run, "jv"):
        cfg = run.simulation_config(
            jv={"v_max": vmax, "v_step": vstep, "points_past_voc": points_past_voc, "dark": dark or None}
        )
        stack = run.stack()
        spectrum = run.load_spectrum()
        out = run.out_dir()
        log_info("CLI jv invoked", layers=stack.labels, v_max=cfg.jv.v_max, v_step=cfg.jv.v_step)
        curve, metrics = simulate_jv(stack, cfg, spectrum)
        write_curve_csv(curve, out / "jv.csv")
        write_power_csv(curve, out / "pv.csv", metrics)
        write_metrics_json(metrics, out / "metrics.json", samples=len(curve), truncated=curve.truncated)
    _display_metrics(metrics)
    if curve.truncated:
        typer.echo("Warning: the solver failed beyond Voc; the curve was truncated.", err=True)
    typer.echo(f"Wrote {len(curve)} samples to {out / 'jv.csv'}")


@app.command(help="Compute external quantum efficiency at 0 V.")
def qe(
    ctx: typer.Context,
    wl_start: Optional[float] = typer.Option(None, "--wl-start", help="First wavelength in nm (default 300)."),
    wl_stop: Optional[float] = typer.Option(None, "--wl-stop", help="Last wavelength in nm (default 1200)."),
    wl_step: Optional[float] = typer.Option(None, "--wl-step", help="Wavelength step in nm (default 10)."),
) -> None:
    """Write ``qe.csv``; failed wavelengths go to ``qe_failures.log``."""
    run = _run(ctx)
    with _reporting_errors(run, "qe"):
        cfg = run.simulation_config(qe={"wl_start": wl_start, "wl_stop": wl_stop, "wl_step": wl_step})
        grid = wavelength_grid(cfg.qe.wl_start, cfg.qe.wl_stop, cfg.qe.wl_step)
        stack = run.stack()
        out = run.out_dir()
        jobs = resolve_jobs(run.jobs if run.jobs is not None else cfg.sweep.jobs)
        log_info("CLI qe invoked", layers=stack.labels, points=len(grid), jobs=jobs)
        curve = compute_qe(stack, grid, cfg, jobs=jobs)
        write_qe_csv(curve, out / "qe.csv")
        failures = write_qe_failures(curve, out / "qe_failures.log")
    typer.echo(f"Wrote {len(curve)} wavelengths to {out / 'qe.csv'}")
    if failures is not None:
        typer.echo(f"Warning: {len(curve.failures)} wavelengths failed, see {failures}", err=True)


@app.command(help="Two-parameter grid sweep with heatmap output.")
def sweep(
    ctx: typer.Context,
    axis1: str = typer.Option(..., "--axis1", help="LAYER.PARAM=start:stop:step or LAYER.PARAM=1eA:1eB"),
    axis2: str = typer.Option(..., "--axis2", help="Second axis, same syntax."),
    metric: Optional[str] = typer.Option(None, "--metric", help="PCE, FF, Voc or Jsc (default PCE)."),
) -> None:
    """Write ``pce.csv``, ``ff.csv``, ``jsc.csv``, ``voc.csv``, ``failures.csv`` and ``best.json``."""
    run = _run(ctx)
    with _reporting_errors(run, "sweep"):
        cfg = run.simulation_config(sweep={"metric": metric, "jobs": run.jobs})
        first, second = SweepAxis.parse(axis1), SweepAxis.parse(axis2)
        stack = run.stack()
        spectrum = run.load_spectrum()
        out = run.out_dir()
        log_info("CLI sweep invoked", axis1=first.name, axis2=second.name, metric=cfg.sweep.metric)
        result = run_grid_sweep(stack, first, second, cfg, spectrum)
        write_heatmaps(result, out, cfg.sweep.metric)
        value1, value2, best = best_cell(result, cfg.sweep.metric)
    rows, cols = result.shape
    typer.echo(f"{rows}×{cols} grid, {len(result.failures)} failed cells")
    typer.echo(f"Best {cfg.sweep.metric}: {first.name} = {value1:g}, {second.name} = {value2:g}")
    _display_metrics(best, title="Best cell")


@app.command(help="Compare J-V, P-V and QE of several presets.")
def compare(
    ctx: typer.Context,
    presets: str = typer.Option(DEFAULT_COMPARE, "--presets", help="Comma-separated preset names."),
    with_qe: bool = typer.Option(True, "--qe/--no-qe", help="Include QE curves."),
) -> None:
    """Write ``jv_compare.csv``, ``pv_compare.csv``, ``qe_compare.csv`` and ``metrics_compare.csv``."""
    run = _run(ctx)
    with _reporting_errors(run, "compare"):
        cfg = run.simulation_config()
        names = [name.strip() for name in presets.split(",") if name.strip()]
        if len(names) < 2:
            raise ConfigError("Give at least two presets to compare", field="presets")
        stacks = {name: preset(name, run.temperature or 300.0) for name in names}
        spectrum = run.load_spectrum()
        out = run.out_dir()
        wavelengths = (
            wavelength_grid(cfg.qe.wl_start, cfg.qe.wl_stop, cfg.qe.wl_step) if with_qe else None
        )
        jobs = resolve_jobs(run.jobs if run.jobs is not None else cfg.sweep.jobs)
        result = compare_stacks(stacks, cfg, spectrum, wavelengths, jobs=jobs)
        written = write_comparison(result, out)
    for name, metrics in result.metrics.items():
        _display_metrics(metrics, title=name)
    typer.echo(f"Wrote {len(written)} files to {out}")


@app.command(help="Run a multi-step optimization study.")
def study(
    ctx: typer.Context,
    study_file: str = typer.Argument("reference", help="Study file (YAML/JSON) or 'reference' for the bundled study."),
) -> None:
    """Each step's best cell seeds the next step; writes ``study.json`` and one directory per step."""
    run = _run(ctx)
    with _reporting_errors(run, "study"):
        plan = load_study(study_file)
        cfg = run.simulation_config(sweep={"jobs": run.jobs})
        template = run.stack(default_preset="pn-baseline")
        spectrum = run.load_spectrum()
        out = run.out_dir()
        log_info("CLI study invoked", study=plan.name, steps=len(plan.steps))
        result = run_study(template, plan, cfg, spectrum, out)
    _display_table(
        ["step", "metric", "best", "value"],
        [
            (
                outcome.step.name,
                outcome.step.metric,
                ", ".join(f"{k} = {v:g}" for k, v in outcome.record()["best"].items()),
                f"{outcome.metrics.value(outcome.step.metric):.4g}",
            )
            for outcome in result.steps
        ],
    )
    _display_stack(result.final_stack)
    typer.echo(f"Wrote {out / 'study.json'}")


@app.command(help="Validate a device file and print its layers.")
def validate(
    ctx: typer.Context,
    device_path: Path = typer.Argument(..., help="Device file (JSON or YAML)."),
) -> None:
    run = _run(ctx)
    if not device_path.exists():
        _fail(f"Device file not found: {device_path}", 2)
    with _reporting_errors(run, "validate"):
        stack = load_device(device_path)
    _display_stack(stack)
    typer.echo("Device is valid.")


@app.command(help="Write a preset as a device file to start from.")
def init(
    preset_name: str = typer.Option("pn-baseline", "--preset", "-p", help="Preset to write."),
    output: Optional[Path] = typer.Option(
        None, "--output", "-o", help="Output path (default device.yaml or device.json)."
    ),
    format: str = typer.Option("yaml", "--format", "-f", help="yaml or json."),
    force: bool = typer.Option(False, "--force", help="Overwrite an existing file without prompting."),
    skip_existing: bool = typer.Option(False, "--skip-existing", help="Keep an existing file."),
) -> None:
    """Create a device file from a bundled preset.

    Examples:
        # YAML copy of the baseline stack
        sunstack init

        # JSON copy of the optimized PPN stack
        sunstack init --preset ppn-optimized --format json
    """
    if format not in ("yaml", "json"):
        _fail(f"Error: Format must be 'yaml' or 'json', got '{format}'", 2)
    output_path = output or Path(f"device.{format}")

    if output_path.exists():
        if skip_existing:
            typer.echo(f"File {output_path} already exists, skipping.")
            return
        if not force and not typer.confirm(f"File {output_path} already exists. Overwrite?"):
            typer.echo("Operation cancelled.")
            return

    try:
        stack = preset(preset_name)
    except ConfigError as exc:
        _fail(f"Config error: {exc}", 2)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    output_path.write_text(dump_device(stack, f".{format}"), encoding="utf-8")
    typer.echo(f"Created device file {output_path} from preset {preset_name}")


__all__ = ["app", "RunConfig"]
