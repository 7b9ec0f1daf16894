"""Named reference stacks.

``pn-*`` presets are the p-CIGS/n-CdS/n-ZnO heterojunction; ``ppn-*`` presets
add a p-GaAs layer behind the CIGS absorber. The ZnO window is contacted
with the metal Fermi level at its conduction-band edge; the back contact is
flat band.
"""

from __future__ import annotations

from typing import Callable

from sunstack.errors import DeviceError
from .stack import ContactSpec, DeviceStack, LayerSpec, build_stack

BASELINE_THICKNESS_UM = 0.5
BASELINE_DOPING_CM3 = 1e10
WINDOW_CONTACT = ContactSpec(majority_barrier_ev=0.0)


def _pn(cigs_um: float, cigs_doping: float, cds_doping: float) -> list[LayerSpec]:
    return [
        ("p-CIGS", cigs_um, "acceptor", cigs_doping),
        ("n-CdS", 0.5, "donor", cds_doping),
        ("n-ZnO", 0.5, "donor", BASELINE_DOPING_CM3),
    ]


def _gaas(thickness_um: float, doping: float) -> LayerSpec:
    return ("p-GaAs", thickness_um, "acceptor", doping)


_PRESETS: dict[str, Callable[[], list[LayerSpec]]] = {
    "pn-baseline": lambda: _pn(BASELINE_THICKNESS_UM, BASELINE_DOPING_CM3, BASELINE_DOPING_CM3),
    "pn-optimized": lambda: _pn(5.0, BASELINE_DOPING_CM3, BASELINE_DOPING_CM3),
    "pn-doping-optimized": lambda: _pn(5.0, 1e20, BASELINE_DOPING_CM3),
    "ppn-baseline": lambda: [
        _gaas(BASELINE_THICKNESS_UM, BASELINE_DOPING_CM3),
        *_pn(5.0, BASELINE_DOPING_CM3, BASELINE_DOPING_CM3),
    ],
    "ppn-optimized": lambda: [_gaas(5.0, 1e20), *_pn(5.0, 1e20, BASELINE_DOPING_CM3)],
}

PRESET_NAMES: tuple[str, ...] = tuple(_PRESETS)


def preset(name: str, temperature: float = 300.0) -> DeviceStack:
    """Return the named reference stack.

    Raises:
        DeviceError: If ``name`` is not a known preset.
    """
    try:
        factory = _PRESETS[name]
    except KeyError:
        raise DeviceError(
            f"Unknown preset '{name}' (available: {', '.join(PRESET_NAMES)})"
        ) from None
    return build_stack(factory(), temperature, front_contact=WINDOW_CONTACT)


def baseline_stack(temperature: float = 300.0) -> DeviceStack:
    """CIGS/CdS/ZnO at 0.5 µm and 10¹⁰ cm⁻³ per layer."""
    return preset("pn-baseline", temperature)


__all__ = [
    "BASELINE_THICKNESS_UM",
    "BASELINE_DOPING_CM3",
    "WINDOW_CONTACT",
    "PRESET_NAMES",
    "preset",
    "baseline_stack",
]
