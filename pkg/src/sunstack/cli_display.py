"""CLI display helpers for sunstack.

Kept apart from cli.py so command definitions stay free of table rendering.
"""

from __future__ import annotations

from typing import Optional, Sequence

import typer

from .analysis.metrics import CellMetrics
from .device.stack import DeviceStack


def _display_table(columns: Sequence[str], rows: Sequence[Sequence[object]]) -> None:
    """Print rows as a boxed, left-aligned text table."""
    if not columns:
        return
    str_rows = [[str(cell) for cell in row] for row in rows]
    widths = [
        max([len(str(col)), *(len(row[i]) for row in str_rows if i < len(row))])
        for i, col in enumerate(columns)
    ]
    separator = "+" + "+".join("-" * (width + 2) for width in widths) + "+"

    def _line(cells: Sequence[str]) -> str:
        padded = list(cells) + [""] * (len(widths) - len(cells))
        return "|" + "|".join(f" {padded[i]:<{widths[i]}} " for i in range(len(widths))) + "|"

    typer.echo(separator)
    typer.echo(_line([str(col) for col in columns]))
    typer.echo(separator)
    for row in str_rows:
        typer.echo(_line(row))
    typer.echo(separator)


def _display_stack(stack: DeviceStack) -> None:
    """Layer table in back → front order."""
    typer.echo(
        f"{len(stack.layers)} layers, {stack.total_thickness_um:g} µm, "
        f"{stack.temperature:g} K, light from the {stack.illumination_side}"
    )
    _display_table(
        ["#", "layer", "material", "thickness (µm)", "doping", "density (cm⁻³)", "Eg (eV)"],
        [
            (
                index,
                layer.label,
                layer.material.name,
                f"{layer.thickness_um:g}",
                layer.doping_type,
                f"{layer.doping_cm3:.3g}",
                f"{layer.material.bandgap:g}",
            )
            for index, layer in enumerate(stack.layers)
        ],
    )


def _display_metrics(metrics: Optional[CellMetrics], title: str = "Cell metrics") -> None:
    if metrics is None:
        typer.echo(f"{title}: dark curve, no metrics")
        return
    typer.echo(
        f"{title}: Voc = {metrics.voc:.4f} V, Jsc = {metrics.jsc:.3f} mA/cm², "
        f"FF = {metrics.ff * 100:.2f} %, PCE = {metrics.pce * 100:.2f} %"
    )


def _fail(message: str, code: int) -> None:
    """Print an error message and exit with the given code.

    Args:
        message: Message to write to stderr.
        code: Process exit code.
    """

    typer.echo(message, err=True)
    raise typer.Exit(code)
