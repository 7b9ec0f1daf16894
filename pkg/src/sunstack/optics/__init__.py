"""Illumination spectra and photogeneration."""

from .generation import GenerationProfile, absorption_coefficient, generation_profile, max_photocurrent
from .spectrum import SolarSpectrum, am15g, load_spectrum, parse_spectrum, trapezoid_weights

__all__ = [
    "SolarSpectrum",
    "GenerationProfile",
    "am15g",
    "load_spectrum",
    "parse_spectrum",
    "trapezoid_weights",
    "absorption_coefficient",
    "generation_profile",
    "max_photocurrent",
]
