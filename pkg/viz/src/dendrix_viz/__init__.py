"""Plotting companion for dendrix solver output.

Everything here reads the solver's on-disk artifacts (diagnostics CSV,
raw snapshot pairs, convergence tables) and renders PNG figures.  The
solver package itself is never imported.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .contours import plot_contours
from .curves import plot_scalar_curves
from .io import (
    DIAGNOSTIC_COLUMNS,
    FormatError,
    read_convergence,
    read_diagnostics,
    read_snapshot,
    read_summary,
    snapshot_series,
)
from .isosurface import plot_isosurface
from .loglog import plot_loglog

__version__ = "0.1.0"

PLOT_KINDS = (
    "contours",
    "energy_curves",
    "area_curves",
    "loglog_orders",
    "isosurface_3d",
)

__all__ = [
    "DIAGNOSTIC_COLUMNS",
    "FormatError",
    "PLOT_KINDS",
    "PlotJob",
    "plot_contours",
    "plot_isosurface",
    "plot_loglog",
    "plot_scalar_curves",
    "read_convergence",
    "read_diagnostics",
    "read_snapshot",
    "read_summary",
    "run_job",
    "snapshot_series",
]


@dataclass(frozen=True)
class PlotJob:
    """One figure request: input artifacts, plot kind, styling, output.

    ``options`` holds the kind-specific keyword arguments accepted by the
    matching ``plot_*`` function (levels, cmap, title, dpi, ...).
    """

    kind: str
    inputs: tuple
    out_path: Path
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in PLOT_KINDS:
            raise ValueError(
                f"unknown plot kind {self.kind!r}; expected one of "
                f"{', '.join(PLOT_KINDS)}"
            )
        if not self.inputs:
            raise ValueError("a plot job needs at least one input path")


def run_job(job: PlotJob) -> Any:
    """Dispatch a :class:`PlotJob` to the matching plot function."""
    opts = dict(job.options)
    if job.kind == "contours":
        return plot_contours(job.inputs, job.out_path, **opts)
    if job.kind == "energy_curves":
        columns = opts.pop("columns", ("E", "q"))
        return plot_scalar_curves(job.inputs, columns, job.out_path, **opts)
    if job.kind == "area_curves":
        columns = opts.pop("columns", ("area",))
        return plot_scalar_curves(job.inputs, columns, job.out_path, **opts)
    if job.kind == "loglog_orders":
        if len(job.inputs) != 1:
            raise ValueError("loglog_orders takes exactly one convergence table")
        return plot_loglog(job.inputs[0], job.out_path, **opts)
    # Kind validation in PlotJob leaves only isosurface_3d.
    if len(job.inputs) != 1:
        raise ValueError("isosurface_3d takes exactly one snapshot")
    return plot_isosurface(job.inputs[0], job.out_path, **opts)
