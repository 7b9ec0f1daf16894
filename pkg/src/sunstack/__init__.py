"""sunstack public API."""

# Configuration
from .config import (
    JVConfig,
    MeshConfig,
    OpticsConfig,
    QEConfig,
    SimulationConfig,
    SolverConfig,
    SweepConfig,
    load_simulation_config,
)

# Device description
from .device import (
    ContactSpec,
    DeviceStack,
    Layer,
    Material,
    Mesh,
    TrapSpec,
    baseline_stack,
    build_stack,
    generate_mesh,
    load_device,
    preset,
    save_device,
)

# Optics and transport kernels
from .optics import (
    GenerationProfile,
    SolarSpectrum,
    am15g,
    generation_profile,
    load_spectrum,
    max_photocurrent,
)
from .transport import bernoulli, sg_flux, srh_recombination

# Solvers
from .solver import (
    SimState,
    continuation_sweep,
    illuminate,
    solve_bias,
    solve_equilibrium,
)

# Analysis
from .analysis import (
    CellMetrics,
    IVCurve,
    QECurve,
    band_diagram,
    compute_jv,
    compute_qe,
    extract_metrics,
    pce_identity,
    power_curve,
)

# Sweeps and studies
from .sweep import HeatmapResult, SweepAxis, best_cell, run_grid_sweep, write_heatmaps
from .study import StudyConfig, StudyStep, load_study, reference_study, run_study

# Convenience
from .python_api import WorkingPoint, resolve_stack, simulate, simulate_jv
from .performance import PerformanceMetrics

# Errors
from .errors import (
    AnalysisError,
    AxisError,
    ConfigError,
    ConvergenceError,
    DeviceError,
    MeshError,
    NegativeDensityError,
    SolverError,
    SpectrumError,
    SunstackError,
    SweepError,
    VocOutOfRangeError,
)

__all__ = [
    # Configuration
    "SimulationConfig",
    "MeshConfig",
    "SolverConfig",
    "OpticsConfig",
    "JVConfig",
    "QEConfig",
    "SweepConfig",
    "load_simulation_config",
    # Device
    "Material",
    "TrapSpec",
    "Layer",
    "ContactSpec",
    "DeviceStack",
    "Mesh",
    "build_stack",
    "preset",
    "baseline_stack",
    "generate_mesh",
    "load_device",
    "save_device",
    # Optics and transport
    "SolarSpectrum",
    "GenerationProfile",
    "am15g",
    "load_spectrum",
    "generation_profile",
    "max_photocurrent",
    "bernoulli",
    "sg_flux",
    "srh_recombination",
    # Solvers
    "SimState",
    "solve_equilibrium",
    "solve_bias",
    "continuation_sweep",
    "illuminate",
    # Analysis
    "IVCurve",
    "CellMetrics",
    "QECurve",
    "compute_jv",
    "extract_metrics",
    "power_curve",
    "pce_identity",
    "compute_qe",
    "band_diagram",
    # Sweeps and studies
    "SweepAxis",
    "HeatmapResult",
    "run_grid_sweep",
    "best_cell",
    "write_heatmaps",
    "StudyConfig",
    "StudyStep",
    "reference_study",
    "load_study",
    "run_study",
    # Convenience
    "WorkingPoint",
    "resolve_stack",
    "simulate",
    "simulate_jv",
    "PerformanceMetrics",
    # Errors
    "SunstackError",
    "ConfigError",
    "DeviceError",
    "SpectrumError",
    "AxisError",
    "MeshError",
    "SolverError",
    "ConvergenceError",
    "NegativeDensityError",
    "AnalysisError",
    "VocOutOfRangeError",
    "SweepError",
]
