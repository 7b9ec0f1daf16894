"""Illumination spectra.

The default spectrum is the ASTM G173-03 global tilt (AM1.5G) table bundled
with pvlib. Custom spectra are plain text with two whitespace-separated
columns, wavelength (nm) and spectral irradiance (W/m²/nm); ``#`` starts a
comment.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.integrate import trapezoid

from sunstack.constants import C, H, HC_EV_NM
from sunstack.config.validators import log_debug
from sunstack.errors import SpectrumError

M2_TO_CM2 = 1e-4


def trapezoid_weights(x: np.ndarray) -> np.ndarray:
    """Weights w with Σ w·f = trapezoid(f, x)."""
    if x.size == 1:
        return np.ones(1)
    dx = np.diff(x)
    weights = np.zeros_like(x, dtype=float)
    weights[:-1] += dx / 2
    weights[1:] += dx / 2
    return weights


@dataclass(frozen=True, eq=False)
class SolarSpectrum:
    """Spectral irradiance samples.

    With ``delta`` set the spectrum is a single monochromatic line and
    ``irradiance[0]`` is a power density in W/m² rather than W/m²/nm.
    """

    wavelengths_nm: np.ndarray
    irradiance: np.ndarray
    delta: bool = False
    name: str = ""

    def __post_init__(self) -> None:
        wl = np.asarray(self.wavelengths_nm, dtype=float)
        irr = np.asarray(self.irradiance, dtype=float)
        if wl.ndim != 1 or wl.shape != irr.shape:
            raise SpectrumError("Wavelength and irradiance columns must have equal length")
        if wl.size == 0:
            raise SpectrumError("Spectrum is empty")
        if self.delta and wl.size != 1:
            raise SpectrumError("A monochromatic spectrum has exactly one sample")
        if not np.all(np.isfinite(wl)) or not np.all(np.isfinite(irr)):
            raise SpectrumError("Spectrum contains non-finite values")
        if np.any(wl <= 0):
            raise SpectrumError("Wavelengths must be positive")
        if np.any(np.diff(wl) <= 0):
            raise SpectrumError("Wavelengths must be strictly increasing")
        if np.any(irr < 0):
            raise SpectrumError("Irradiance must be non-negative")
        object.__setattr__(self, "wavelengths_nm", wl)
        object.__setattr__(self, "irradiance", irr)

    @property
    def total_power(self) -> float:
        """Integrated power density in mW/cm²."""
        if self.delta:
            watts = float(self.irradiance[0])
        elif self.wavelengths_nm.size == 1:
            watts = 0.0
        else:
            watts = float(trapezoid(self.irradiance, self.wavelengths_nm))
        return watts * M2_TO_CM2 * 1e3

    def photon_flux_density(self) -> np.ndarray:
        """Photons per cm² per s (per nm unless ``delta``) at each sample."""
        wavelength_m = self.wavelengths_nm * 1e-9
        return self.irradiance * wavelength_m / (H * C) * M2_TO_CM2

    def quadrature(
        self, wl_min: float = 300.0, wl_max: float = 1300.0
    ) -> tuple[np.ndarray, np.ndarray]:
        """Wavelength samples in [wl_min, wl_max] and their photon fluxes (cm⁻² s⁻¹).

        Continuous spectra use trapezoid weights over the retained samples.
        """
        keep = (self.wavelengths_nm >= wl_min) & (self.wavelengths_nm <= wl_max)
        wl = self.wavelengths_nm[keep]
        flux = self.photon_flux_density()[keep]
        if self.delta:
            return wl, flux
        return wl, flux * trapezoid_weights(wl)

    def photon_flux_above(
        self, energy_ev: float, wl_min: float = 300.0, wl_max: float = 1300.0
    ) -> float:
        """Photon flux (cm⁻² s⁻¹) with photon energy above ``energy_ev``."""
        wl, flux = self.quadrature(wl_min, wl_max)
        return float(flux[HC_EV_NM / wl > energy_ev].sum())

    def scaled(self, factor: float) -> "SolarSpectrum":
        """Same shape with irradiance multiplied by ``factor``."""
        if factor < 0:
            raise SpectrumError("Spectrum scale factor must be non-negative")
        return SolarSpectrum(
            self.wavelengths_nm, self.irradiance * factor, self.delta, self.name
        )

    @classmethod
    def monochromatic(cls, wavelength_nm: float, photon_flux: float) -> "SolarSpectrum":
        """Single line carrying ``photon_flux`` photons/cm²/s."""
        watts_m2 = photon_flux / M2_TO_CM2 * H * C / (wavelength_nm * 1e-9)
        return cls(
            np.array([wavelength_nm], dtype=float),
            np.array([watts_m2]),
            delta=True,
            name=f"{wavelength_nm:g} nm",
        )


@lru_cache(maxsize=1)
def _reference_am15g() -> tuple[np.ndarray, np.ndarray]:
    from pvlib.spectrum import get_reference_spectra

    table = get_reference_spectra(standard="ASTM G173-03")
    return table.index.to_numpy(dtype=float), table["global"].to_numpy(dtype=float)


def am15g() -> SolarSpectrum:
    """The bundled AM1.5G (ASTM G173-03 global tilt) spectrum."""
    wl, irr = _reference_am15g()
    return SolarSpectrum(wl.copy(), irr.copy(), name="AM1.5G")


def parse_spectrum(text: str, source: str = "<spectrum>", delta: bool = False) -> SolarSpectrum:
    """Parse two-column spectrum text."""
    wavelengths: list[float] = []
    values: list[float] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 2:
            raise SpectrumError(f"{source}:{line_no}: expected 2 columns, got {len(parts)}")
        try:
            wavelength, value = float(parts[0]), float(parts[1])
        except ValueError as exc:
            raise SpectrumError(f"{source}:{line_no}: not a number: {line!r}") from exc
        if wavelengths and wavelength <= wavelengths[-1]:
            raise SpectrumError(
                f"{source}:{line_no}: wavelengths must be strictly increasing "
                f"({wavelength:g} after {wavelengths[-1]:g})"
            )
        if value < 0:
            raise SpectrumError(f"{source}:{line_no}: negative irradiance {value:g}")
        wavelengths.append(wavelength)
        values.append(value)

    if not wavelengths:
        raise SpectrumError(f"{source}: spectrum file is empty")
    if delta and len(wavelengths) != 1:
        raise SpectrumError(f"{source}: monochromatic mode needs exactly one line")
    return SolarSpectrum(np.array(wavelengths), np.array(values), delta=delta, name=source)


def load_spectrum(path: Optional[str | Path] = None, delta: bool = False) -> SolarSpectrum:
    """Load a spectrum file, or the bundled AM1.5G table when ``path`` is None.

    Args:
        path: Two-column text file.
        delta: Treat a single-line file as a monochromatic source whose second
            column is a power density in W/m².

    Raises:
        SpectrumError: Missing/empty file, non-monotonic wavelengths or
            negative irradiance.
    """
    if path is None:
        spectrum = am15g()
    else:
        file_path = Path(path)
        try:
            text = file_path.read_text(encoding="utf-8")
        except OSError as exc:
            raise SpectrumError(f"Cannot read spectrum '{file_path}': {exc}", cause=exc) from exc
        spectrum = parse_spectrum(text, source=str(file_path), delta=delta)
    log_debug(
        "Loaded spectrum",
        name=spectrum.name,
        samples=int(spectrum.wavelengths_nm.size),
        power_mW_cm2=round(spectrum.total_power, 4),
    )
    return spectrum


__all__ = [
    "SolarSpectrum",
    "trapezoid_weights",
    "am15g",
    "parse_spectrum",
    "load_spectrum",
]
