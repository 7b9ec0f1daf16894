"""Carrier statistics, recombination and Scharfetter-Gummel fluxes.

Potentials are in V, energies in eV (numerically equal for unit charge),
densities in cm⁻³ and lengths in cm. The kernels accept numpy arrays or
scalars and return the same shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from sunstack.constants import A_TO_MA, EPS0, Q, thermal_voltage
from sunstack.device.materials import Material, TrapSpec
from sunstack.device.mesh import Mesh, check_mesh_matches
from sunstack.device.stack import ContactSpec, DeviceStack, Layer

Carrier = Literal["electron", "hole"]

_SERIES_LIMIT = 1e-4


def bernoulli(x):
    """B(x) = x / (eˣ − 1), with B(0) = 1.

    Uses the series 1 − x/2 + x²/12 for |x| < 1e-4.
    """
    arr = np.asarray(x, dtype=float)
    small = np.abs(arr) < _SERIES_LIMIT
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        safe = np.where(small, 1.0, arr)
        value = np.where(small, 1.0 - arr / 2 + arr * arr / 12, safe / np.expm1(safe))
    if value.ndim == 0:
        return float(value)
    return value


def intrinsic_density(material: Material, temperature: float):
    """ni = sqrt(Nc·Nv)·exp(−Eg / 2kT) in cm⁻³."""
    vt = thermal_voltage(temperature)
    return math.sqrt(material.Nc * material.Nv) * math.exp(-material.bandgap / (2 * vt))


def equilibrium_carriers(
    material: Material, doping_type: str, density: float, temperature: float
) -> tuple[float, float]:
    """Charge-neutral (n₀, p₀) for a uniformly doped region.

    The majority density is computed from the quadratic root and the minority
    density from mass action so that neither loses precision.
    """
    ni = intrinsic_density(material, temperature)
    net = density if doping_type == "donor" else -density
    root = math.sqrt(net * net + 4 * ni * ni)
    if net >= 0:
        n0 = (net + root) / 2
        p0 = ni * ni / n0 if n0 > 0 else 0.0
    else:
        p0 = (-net + root) / 2
        n0 = ni * ni / p0
    return n0, p0


def srh_recombination(
    n,
    p,
    ni,
    trap: Optional[TrapSpec],
    vth_e: float,
    vth_p: float,
    temperature: float = 300.0,
):
    """Net Shockley-Read-Hall recombination rate (cm⁻³ s⁻¹)."""
    n = np.asarray(n, dtype=float)
    p = np.asarray(p, dtype=float)
    if trap is None or trap.density == 0:
        rate = np.zeros(np.broadcast(n, p).shape)
    else:
        tau_n, tau_p = trap.lifetimes(vth_e, vth_p)
        vt = thermal_voltage(temperature)
        n1 = ni * math.exp(trap.energy_level / vt)
        p1 = ni * math.exp(-trap.energy_level / vt)
        rate = (n * p - ni * ni) / (tau_p * (n + n1) + tau_n * (p + p1))
    if rate.ndim == 0:
        return float(rate)
    return rate


def sg_flux(psi_i, psi_j, c_i, c_j, mu, h, carrier: Carrier, temperature: float = 300.0):
    """Scharfetter-Gummel current density (mA/cm²) from node i to node j.

    ``psi`` is the potential seen by the carrier (electrostatic potential plus
    band-edge shifts for heterojunctions).
    """
    vt = thermal_voltage(temperature)
    delta = (np.asarray(psi_j, dtype=float) - np.asarray(psi_i, dtype=float)) / vt
    scale = Q * np.asarray(mu) * vt / np.asarray(h) * A_TO_MA
    if carrier == "electron":
        flux = scale * (bernoulli(delta) * c_j - bernoulli(-delta) * c_i)
    elif carrier == "hole":
        flux = scale * (bernoulli(delta) * c_i - bernoulli(-delta) * c_j)
    else:
        raise ValueError(f"carrier must be 'electron' or 'hole', got {carrier!r}")
    flux = np.asarray(flux)
    if flux.ndim == 0:
        return float(flux)
    return flux


@dataclass(frozen=True, eq=False)
class BandParams:
    """Per-node and per-edge material data laid out on a mesh.

    Node arrays use the node's owning layer; edge arrays the edge's layer.
    ``eps`` is ε/q in 1/(V·cm) so that Poisson's equation balances densities.
    """

    mesh: Mesh
    temperature: float
    vt: float
    chi: np.ndarray
    bandgap: np.ndarray
    Nc: np.ndarray
    Nv: np.ndarray
    net_doping: np.ndarray
    ni: np.ndarray
    tau_n: np.ndarray
    tau_p: np.ndarray
    n1: np.ndarray
    p1: np.ndarray
    radiative: np.ndarray
    eps_edge: np.ndarray
    mu_e_edge: np.ndarray
    mu_h_edge: np.ndarray
    n0: np.ndarray
    p0: np.ndarray
    psi_neutral: np.ndarray
    psi_contact: tuple[float, float]

    @property
    def contact_electrons(self) -> tuple[float, float]:
        """Electron density held at the (back, front) contact nodes."""
        return (
            float(self.Nc[0] * np.exp((self.chi[0] + self.psi_contact[0]) / self.vt)),
            float(self.Nc[-1] * np.exp((self.chi[-1] + self.psi_contact[1]) / self.vt)),
        )

    @property
    def contact_holes(self) -> tuple[float, float]:
        depth = self.chi + self.bandgap
        return (
            float(self.Nv[0] * np.exp(-(depth[0] + self.psi_contact[0]) / self.vt)),
            float(self.Nv[-1] * np.exp(-(depth[-1] + self.psi_contact[1]) / self.vt)),
        )

    def equilibrium_guess(self) -> np.ndarray:
        """Charge-neutral potential with the contact values at both ends."""
        psi = self.psi_neutral.copy()
        psi[0], psi[-1] = self.psi_contact
        return psi

    @property
    def ni2(self) -> np.ndarray:
        return self.ni * self.ni

    def conduction_band(self, psi: np.ndarray) -> np.ndarray:
        """Ec = −χ − ψ (eV)."""
        return -self.chi - psi

    def valence_band(self, psi: np.ndarray) -> np.ndarray:
        """Ev = Ec − Eg (eV)."""
        return -self.chi - self.bandgap - psi

    def electron_potential(self, psi: np.ndarray) -> np.ndarray:
        """Effective potential u with n = exp((EFn + u)/Vt)."""
        return psi + self.chi + self.vt * np.log(self.Nc)

    def hole_potential(self, psi: np.ndarray) -> np.ndarray:
        """Effective potential w with p = exp(−(EFp + w)/Vt)."""
        return psi + self.chi + self.bandgap - self.vt * np.log(self.Nv)

    def electron_density(self, psi: np.ndarray, efn: np.ndarray) -> np.ndarray:
        return self.Nc * np.exp((efn + self.chi + psi) / self.vt)

    def hole_density(self, psi: np.ndarray, efp: np.ndarray) -> np.ndarray:
        return self.Nv * np.exp(-(efp + self.chi + self.bandgap + psi) / self.vt)

    def electron_fermi(self, psi: np.ndarray, n: np.ndarray) -> np.ndarray:
        return self.vt * np.log(n / self.Nc) - self.chi - psi

    def hole_fermi(self, psi: np.ndarray, p: np.ndarray) -> np.ndarray:
        return -self.vt * np.log(p / self.Nv) - self.chi - self.bandgap - psi


def contact_potential(contact: ContactSpec, layer: Layer, psi_neutral: float) -> float:
    """Electrostatic potential held at a contact node at zero bias (V).

    ``psi_neutral`` is the flat-band value used when the contact has no
    majority barrier set.
    """
    barrier = contact.majority_barrier_ev
    if barrier is None:
        return psi_neutral
    m = layer.material
    if layer.doping_type == "donor":
        return -m.electron_affinity - barrier
    return -m.electron_affinity - m.bandgap + barrier


def band_params(stack: DeviceStack, mesh: Mesh) -> BandParams:
    """Lay the stack's material data out on ``mesh``."""
    check_mesh_matches(stack, mesh)
    temperature = stack.temperature
    vt = thermal_voltage(temperature)

    per_layer: dict[str, list[float]] = {
        key: []
        for key in (
            "chi", "eg", "nc", "nv", "net", "ni", "tau_n", "tau_p", "n1", "p1",
            "brad", "eps", "mu_e", "mu_h", "n0", "p0",
        )
    }
    for layer in stack.layers:
        m = layer.material
        ni = intrinsic_density(m, temperature)
        tau_n, tau_p = m.trap.lifetimes(m.vth_e, m.vth_h) if m.trap else (math.inf, math.inf)
        et = m.trap.energy_level if m.trap else 0.0
        n0, p0 = equilibrium_carriers(m, layer.doping_type, layer.doping_cm3, temperature)
        values = {
            "chi": m.electron_affinity,
            "eg": m.bandgap,
            "nc": m.Nc,
            "nv": m.Nv,
            "net": layer.net_doping,
            "ni": ni,
            "tau_n": tau_n,
            "tau_p": tau_p,
            "n1": ni * math.exp(et / vt),
            "p1": ni * math.exp(-et / vt),
            "brad": m.radiative_coeff,
            "eps": m.rel_permittivity * EPS0 / Q,
            "mu_e": m.mu_e,
            "mu_h": m.mu_h,
            "n0": n0,
            "p0": p0,
        }
        for key, value in values.items():
            per_layer[key].append(value)

    table = {key: np.asarray(values, dtype=float) for key, values in per_layer.items()}
    node = mesh.layer_of_node
    edge = mesh.layer_of_edge
    chi = table["chi"][node]
    nc = table["nc"][node]
    n0 = table["n0"][node]
    psi_neutral = vt * np.log(n0 / nc) - chi
    psi_contact = (
        contact_potential(stack.back_contact, stack.layers[0], float(psi_neutral[0])),
        contact_potential(stack.front_contact, stack.layers[-1], float(psi_neutral[-1])),
    )
    return BandParams(
        mesh=mesh,
        temperature=temperature,
        vt=vt,
        chi=chi,
        bandgap=table["eg"][node],
        Nc=nc,
        Nv=table["nv"][node],
        net_doping=table["net"][node],
        ni=table["ni"][node],
        tau_n=table["tau_n"][node],
        tau_p=table["tau_p"][node],
        n1=table["n1"][node],
        p1=table["p1"][node],
        radiative=table["brad"][node],
        eps_edge=table["eps"][edge],
        mu_e_edge=table["mu_e"][edge],
        mu_h_edge=table["mu_h"][edge],
        n0=n0,
        p0=table["p0"][node],
        psi_neutral=psi_neutral,
        psi_contact=psi_contact,
    )


__all__ = [
    "Carrier",
    "bernoulli",
    "intrinsic_density",
    "equilibrium_carriers",
    "srh_recombination",
    "sg_flux",
    "BandParams",
    "contact_potential",
    "band_params",
]
