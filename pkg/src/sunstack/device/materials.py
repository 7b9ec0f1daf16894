"""Semiconductor material parameters and the built-in material library."""

from __future__ import annotations

import math
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field


class TrapSpec(BaseModel):
    """Single Shockley-Read-Hall trap level.

    Attributes:
        energy_level: Trap energy relative to the intrinsic level (eV).
        density: Trap density Nt (cm⁻³); zero disables SRH recombination.
        sigma_e: Electron capture cross-section (cm²).
        sigma_p: Hole capture cross-section (cm²).
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    energy_level: float = 0.0
    density: float = Field(default=1e14, ge=0)
    sigma_e: float = Field(default=1e-15, gt=0)
    sigma_p: float = Field(default=1e-15, gt=0)

    def lifetimes(self, vth_e: float, vth_h: float) -> tuple[float, float]:
        """Return (tau_n, tau_p) in seconds; infinite when there are no traps."""
        if self.density == 0:
            return math.inf, math.inf
        return (
            1.0 / (self.sigma_e * vth_e * self.density),
            1.0 / (self.sigma_p * vth_h * self.density),
        )


class Material(BaseModel):
    """Bulk semiconductor parameters.

    Energies in eV, densities in cm⁻³, velocities in cm/s, mobilities in
    cm²/V·s and the radiative coefficient in cm³/s.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    name: str = Field(min_length=1)
    bandgap: float = Field(gt=0)
    electron_affinity: float
    rel_permittivity: float = Field(ge=1)
    Nc: float = Field(gt=0)
    Nv: float = Field(gt=0)
    vth_e: float = Field(gt=0)
    vth_h: float = Field(gt=0)
    mu_e: float = Field(gt=0)
    mu_h: float = Field(gt=0)
    radiative_coeff: float = Field(default=0.0, ge=0)
    trap: Optional[TrapSpec] = None

    @property
    def label(self) -> str:
        """Name without its ``p-``/``n-`` conductivity prefix."""
        head, sep, tail = self.name.partition("-")
        if sep and head in ("p", "n") and tail:
            return tail
        return self.name


DEFAULT_TRAP = TrapSpec()

# name: (Eg, chi, eps_r, Nc, Nv, vth, mu_e, mu_h)
_LIBRARY: dict[str, tuple[float, ...]] = {
    "p-GaAs": (1.42, 4.07, 12.9, 2e18, 1e19, 1e7, 1e3, 1e2),
    "p-CIGS": (1.1, 4.5, 13.6, 2.2e18, 1.8e19, 1e7, 1e2, 1e1),
    "n-CdS": (2.45, 4.4, 10.0, 2.2e18, 1.8e19, 1e7, 1e2, 1e1),
    "n-ZnO": (3.3, 4.6, 9.0, 2.2e18, 1.8e19, 1e7, 1e2, 2.5e1),
}


def default_materials() -> dict[str, Material]:
    """Return the built-in p-GaAs, p-CIGS, n-CdS and n-ZnO parameter sets.

    Every material carries the default midgap trap (10¹⁴ cm⁻³, 10⁻¹⁵ cm²),
    which gives 1 µs lifetimes at the tabulated thermal velocity, and no
    radiative recombination.
    """
    return {
        name: Material(
            name=name,
            bandgap=eg,
            electron_affinity=chi,
            rel_permittivity=eps,
            Nc=nc,
            Nv=nv,
            vth_e=vth,
            vth_h=vth,
            mu_e=mu_e,
            mu_h=mu_h,
            radiative_coeff=0.0,
            trap=DEFAULT_TRAP,
        )
        for name, (eg, chi, eps, nc, nv, vth, mu_e, mu_h) in _LIBRARY.items()
    }


__all__ = ["TrapSpec", "Material", "DEFAULT_TRAP", "default_materials"]
