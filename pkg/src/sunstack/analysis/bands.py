"""Band diagrams of solved states."""

from __future__ import annotations

import pandas as pd

from sunstack.errors import AnalysisError
from sunstack.solver.state import SimState

BAND_COLUMNS = ("x_um", "Ec_eV", "Ev_eV", "EFn_eV", "EFp_eV")


def band_diagram(state: SimState) -> pd.DataFrame:
    """Per-node band edges and quasi-Fermi levels (eV) against position (µm).

    Raises:
        AnalysisError: If ``state`` did not converge.
    """
    if not state.converged:
        raise AnalysisError("Band diagram requires a converged state")
    return pd.DataFrame(
        {
            "x_um": state.mesh.positions_um(),
            "Ec_eV": state.conduction_band,
            "Ev_eV": state.valence_band,
            "EFn_eV": state.efn,
            "EFp_eV": state.efp,
        },
        columns=list(BAND_COLUMNS),
    )


__all__ = ["BAND_COLUMNS", "band_diagram"]
