"""Simulation settings models.

Every numerical knob of the simulator lives here as a pydantic model with
``extra="forbid"``, so a typo in a ``--config`` file is reported instead of
silently ignored. :class:`SimulationConfig` aggregates the per-area models and
is what the solver, analysis and sweep layers receive.

These models must not import from the rest of sunstack to keep the import
graph acyclic.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

MeshPolicy = Literal["graded", "uniform"]
LinearSolver = Literal["auto", "thomas", "banded"]
Metric = Literal["PCE", "FF", "Voc", "Jsc"]


class MeshConfig(BaseModel):
    """Discretization policy.

    Attributes:
        policy: ``graded`` refines geometrically towards every interface and
            contact; ``uniform`` places ``nodes_per_layer`` evenly spaced nodes
            in each layer.
        min_spacing_um: First spacing next to an interface or contact.
        max_spacing_um: Upper bound on spacing inside a layer.
        grading_ratio: Growth factor between neighbouring spacings.
        nodes_per_layer: Node count per layer for the uniform policy.
        min_interior_nodes: Lower bound on interior nodes per layer.
        node_budget: Maximum total node count.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    policy: MeshPolicy = "graded"
    min_spacing_um: float = Field(default=0.001, gt=0)
    max_spacing_um: float = Field(default=0.05, gt=0)
    grading_ratio: float = Field(default=1.2, ge=1.0)
    nodes_per_layer: int = Field(default=41, ge=10)
    min_interior_nodes: int = Field(default=8, ge=1)
    node_budget: int = Field(default=20_000, gt=0)

    @model_validator(mode="after")
    def _check_spacings(self) -> "MeshConfig":
        if self.max_spacing_um < self.min_spacing_um:
            raise ValueError("max_spacing_um must be >= min_spacing_um")
        return self


class SolverConfig(BaseModel):
    """Tolerances and limits for the equilibrium and Gummel solvers.

    ``damping_clamp`` is the largest potential update (V) accepted per Newton
    step; ``None`` means two thermal voltages at the stack temperature.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    potential_tolerance: float = Field(default=1e-9, gt=0)
    residual_tolerance: float = Field(default=1e-6, gt=0)
    max_gummel_iterations: int = Field(default=500, gt=0)
    max_poisson_iterations: int = Field(default=300, gt=0)
    damping_clamp: Optional[float] = Field(default=None, gt=0)
    voltage_step: float = Field(default=0.02, gt=0)
    j_tol: float = Field(default=1e-6, gt=0)
    max_step_halvings: int = Field(default=4, ge=0)
    linear_solver: LinearSolver = "auto"


class OpticsConfig(BaseModel):
    """Optical model settings (direct-gap absorption, no interference)."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    wavelength_min_nm: float = Field(default=300.0, gt=0)
    wavelength_max_nm: float = Field(default=1300.0, gt=0)
    absorption_prefactor: float = Field(default=1e5, gt=0)
    reflectance: float = Field(default=0.0, ge=0.0, lt=1.0)

    @model_validator(mode="after")
    def _check_range(self) -> "OpticsConfig":
        if self.wavelength_max_nm <= self.wavelength_min_nm:
            raise ValueError("wavelength_max_nm must exceed wavelength_min_nm")
        return self


class JVConfig(BaseModel):
    """Bias schedule of a J-V run.

    ``points_past_voc`` stops the sweep that many samples after the current
    changes sign; ``None`` sweeps all the way to ``v_max``.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    v_max: float = Field(default=1.3, gt=0)
    v_step: float = Field(default=0.02, gt=0)
    points_past_voc: Optional[int] = Field(default=None, ge=1)
    dark: bool = False

    @model_validator(mode="after")
    def _check_grid(self) -> "JVConfig":
        if self.v_step > self.v_max:
            raise ValueError("v_step must not exceed v_max")
        return self


class QEConfig(BaseModel):
    """Wavelength grid and probe flux for quantum-efficiency runs."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    wl_start: float = Field(default=300.0, gt=0)
    wl_stop: float = Field(default=1200.0, gt=0)
    wl_step: float = Field(default=10.0, gt=0)
    probe_flux: float = Field(default=1e16, gt=0)

    @model_validator(mode="after")
    def _check_range(self) -> "QEConfig":
        if self.wl_stop <= self.wl_start:
            raise ValueError("wl_start must be smaller than wl_stop")
        return self


class SweepConfig(BaseModel):
    """Grid-sweep execution settings.

    ``jobs`` of ``None`` uses every available core; ``1`` runs cells in the
    calling process.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    jobs: Optional[int] = Field(default=None, ge=1)
    metric: Metric = "PCE"
    points_past_voc: Optional[int] = Field(default=3, ge=1)


class SimulationConfig(BaseModel):
    """All simulator settings in one validated object."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    mesh: MeshConfig = Field(default_factory=MeshConfig)
    solver: SolverConfig = Field(default_factory=SolverConfig)
    optics: OpticsConfig = Field(default_factory=OpticsConfig)
    jv: JVConfig = Field(default_factory=JVConfig)
    qe: QEConfig = Field(default_factory=QEConfig)
    sweep: SweepConfig = Field(default_factory=SweepConfig)

    def with_updates(self, **sections: dict) -> "SimulationConfig":
        """Return a copy with fields of the named sections overridden.

        ``cfg.with_updates(jv={"v_max": 0.9})`` revalidates the touched section.
        Values are applied as given, so ``None`` resets an optional field.
        """
        data = self.model_dump()
        for section, values in sections.items():
            if section not in data:
                raise ValueError(f"Unknown config section '{section}'")
            data[section].update(values)
        return SimulationConfig.model_validate(data)


__all__ = [
    "MeshPolicy",
    "LinearSolver",
    "Metric",
    "MeshConfig",
    "SolverConfig",
    "OpticsConfig",
    "JVConfig",
    "QEConfig",
    "SweepConfig",
    "SimulationConfig",
]
