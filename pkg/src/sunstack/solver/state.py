"""Solution state at one bias/illumination point and current evaluation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from sunstack.constants import A_TO_MA, Q
from sunstack.device.mesh import Mesh
from sunstack.optics.generation import GenerationProfile
from sunstack.transport import BandParams, bernoulli


def edge_currents(
    bands: BandParams,
    psi: np.ndarray,
    n: np.ndarray,
    p: np.ndarray,
    efn: np.ndarray,
    efp: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-edge Jn, Jp (A/cm²) and the magnitude of the terms they cancel from.

    The Scharfetter-Gummel flux is written in quasi-Fermi form,
    ``J = q·μ·Vt/h·B(δ)·c·(1 − exp(−ΔEF/Vt))``, which vanishes identically for
    a flat Fermi level.
    """
    mesh = bands.mesh
    vt = bands.vt
    h = mesh.spacing

    du = np.diff(bands.electron_potential(psi)) / vt
    cn = Q * bands.mu_e_edge * vt / h
    bn = bernoulli(du)
    jn = -cn * bn * n[1:] * np.expm1(-np.diff(efn) / vt)

    dw = np.diff(bands.hole_potential(psi)) / vt
    cp = Q * bands.mu_h_edge * vt / h
    bp = bernoulli(dw)
    jp = -cp * bp * p[:-1] * np.expm1(-np.diff(efp) / vt)

    scale = cn * (bn * n[1:] + bernoulli(-du) * n[:-1]) + cp * (bp * p[:-1] + bernoulli(-dw) * p[1:])
    return jn, jp, scale


def terminal_current(
    bands: BandParams,
    psi: np.ndarray,
    n: np.ndarray,
    p: np.ndarray,
    efn: np.ndarray,
    efp: np.ndarray,
) -> float:
    """Total current density (mA/cm²), positive from back to front contact.

    In steady state every edge carries the same current; it is read at the
    edge with the smallest carrier flux magnitude, where round-off is least.
    """
    jn, jp, scale = edge_currents(bands, psi, n, p, efn, efp)
    edge = int(np.argmin(scale))
    return float((jn[edge] + jp[edge]) * A_TO_MA)


@dataclass(frozen=True, eq=False)
class SimState:
    """Mesh-resolved solution: ψ (V), n, p (cm⁻³), EFn, EFp (eV), J (mA/cm²)."""

    bands: BandParams
    psi: np.ndarray
    n: np.ndarray
    p: np.ndarray
    efn: np.ndarray
    efp: np.ndarray
    current: float
    bias: float
    illuminated: bool
    converged: bool
    iterations: int
    residual: float
    residual_history: list[float] = field(default_factory=list)
    generation: Optional[GenerationProfile] = None

    @property
    def mesh(self) -> Mesh:
        return self.bands.mesh

    def edge_currents(self) -> tuple[np.ndarray, np.ndarray]:
        """Jn and Jp (mA/cm²) on every edge."""
        jn, jp, _ = edge_currents(self.bands, self.psi, self.n, self.p, self.efn, self.efp)
        return jn * A_TO_MA, jp * A_TO_MA

    def poisson_residual(self) -> np.ndarray:
        """Per-node Poisson imbalance (cm⁻²) at interior nodes; zero at contacts."""
        bands = self.bands
        flux = bands.eps_edge * np.diff(self.psi) / self.mesh.spacing
        charge = self.p - self.n + bands.net_doping
        residual = np.zeros_like(self.psi)
        residual[1:-1] = flux[1:] - flux[:-1] + self.mesh.control_volumes[1:-1] * charge[1:-1]
        return residual

    @property
    def conduction_band(self) -> np.ndarray:
        return self.bands.conduction_band(self.psi)

    @property
    def valence_band(self) -> np.ndarray:
        return self.bands.valence_band(self.psi)


__all__ = ["SimState", "edge_currents", "terminal_current"]
