"""Physical constants in the simulator's unit system (cm, eV, V, A)."""

from __future__ import annotations

from scipy import constants as _sc

Q = _sc.e  # C
K_B_EV = _sc.k / _sc.e  # eV/K
EPS0 = _sc.epsilon_0 * 1e-2  # F/cm
H = _sc.h  # J s
C = _sc.c  # m/s

# Photon energy (eV) times wavelength (nm).
HC_EV_NM = 1239.842

A_TO_MA = 1e3


def thermal_voltage(temperature: float) -> float:
    """kT/q in volts."""
    return K_B_EV * temperature


def photon_energy_ev(wavelength_nm):
    """Photon energy (eV) at ``wavelength_nm``; accepts scalars or arrays."""
    return HC_EV_NM / wavelength_nm


__all__ = [
    "Q",
    "K_B_EV",
    "EPS0",
    "H",
    "C",
    "HC_EV_NM",
    "A_TO_MA",
    "thermal_voltage",
    "photon_energy_ev",
]
